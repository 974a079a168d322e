#pragma once

#include <span>
#include <vector>

#include "nrsl/pool.hpp"
#include "nrsl/rng.hpp"
#include "nrsl/sensing.hpp"
#include "nrsl/timeline.hpp"

namespace nrsl {

enum class SelectionMode { Sensing, NoSensing };

struct MacConfig {
  SelectionMode mode = SelectionMode::Sensing;
  int p_rsvp_ms = 100;
  double keep_probability = 0.0;
  int n_selected = 3;
  int n_pssch_max_tx = 5;
  int n_max_reserve = 3;
  int pdb_ms = 100;
  int t2_min_slots = 5;
  int t1_slots = 2;
  T2Policy t2_policy{};
  SensingWindowSpec sensing{};
  int x_percent = 20;
  double rsrp_threshold_dbm = -128.0;
  bool exclude_own_tx_slots = true;
  int subchannels_per_tx = 1;

  /// Resources picked per reservation period: a single 1st-stage SCI can
  /// announce at most n_max_reserve of them.
  [[nodiscard]] int resources_per_period() const;
  void validate() const;
};

/// Semi-persistent grant. `resources` always holds the current period's
/// allocation; each period the whole set moves by P_rsvp.
struct SpsGrant {
  std::vector<Resource> resources;
  int p_rsvp_ms = 100;
  SlotIndex period_slots = 100;
  int slrrc = 0;
  int initial_slrrc = 0;
  int cresel_remaining = 0;
  double keep_probability = 0.0;
  int periods_served = 0;
  SlotIndex selected_at = 0;

  [[nodiscard]] bool active() const { return !resources.empty(); }
};

/// SLRRC draw: uniform on [5, 15] for P_rsvp >= 100 ms, otherwise on
/// [ceil(5*100/max(20,P)), ceil(15*100/max(20,P))].
int draw_slrrc(int p_rsvp_ms, Rng& rng);

/// Inclusive SLRRC interval for a reservation period.
std::pair<int, int> slrrc_bounds(int p_rsvp_ms);

/// Uniform sample without replacement of min(n_tx, |candidates|) resources,
/// returned in slot order. Two picks in the same slot never overlap in
/// frequency. Throws NoCandidates on an empty list.
std::vector<Resource> select_resources(std::span<const Resource> candidates, int n_tx, Rng& rng);

/// Everything a UE needs to (re)select: its config, its view of the pool,
/// its sensing history and the slots of transmissions it already has
/// scheduled (excluded when exclude_own_tx_slots is set).
struct SelectionContext {
  const MacConfig& mac;
  const PoolConfig& pool;
  const SidelinkPattern& pattern;
  const Numerology& numerology;
  const SensingDatabase* sensing_db = nullptr;
  std::span<const SlotIndex> own_scheduled_slots{};
};

struct SelectionResult {
  SpsGrant grant;
  SelectionWindow window;
  ExclusionSet exclusion;
};

/// Builds the selection window at `now`, identifies candidates (sensing
/// mode only), picks resources and starts a fresh SLRRC cycle.
SelectionResult trigger_selection(const SelectionContext& ctx, SlotIndex now,
                                  SelectionMode mode, Rng& selection_rng, Rng& slrrc_rng);

enum class GrantDecision {
  Continue,  // counter not exhausted
  Keep,      // counter exhausted, resources kept with a fresh SLRRC
  Reselect,
};

/// Closes one reservation period: decrements SLRRC and the C_resel budget,
/// moves the resources by P_rsvp when the grant survives.
GrantDecision on_period_end(SpsGrant& grant, Rng& slrrc_rng, Rng& keep_rng);

}  // namespace nrsl
