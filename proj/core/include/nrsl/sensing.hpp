#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <tuple>
#include <vector>

#include "nrsl/pool.hpp"
#include "nrsl/rng.hpp"
#include "nrsl/timeline.hpp"

namespace nrsl {

/// A decoded 1st-stage SCI together with the RSRP measured on it.
struct SciRecord {
  UeId tx_ue = 0;
  SlotIndex slot = 0;
  Resource resource;
  int p_rsvp_ms = 0;  // 0: no periodic reservation signaled
  std::vector<Resource> chained;  // later resources of the same period
  double rsrp_dbm = 0.0;
};

/// A future occupation inferred from the sensing history.
struct ProjectedReservation {
  Resource resource;
  double rsrp_dbm = 0.0;
  UeId tx_ue = 0;
};

/// T_scal: T2 converted to whole milliseconds, rounded up.
int t_scal_ms(int t2_slots, const Numerology& numerology);

/// Q = ceil(T_scal / P_rsvp). Zero when P_rsvp is zero.
int reservation_repeats(int t_scal, int p_rsvp_ms);

/// Per-UE store of received SCIs keyed by (slot, transmitter, resource).
class SensingDatabase {
 public:
  /// Inserts or, for a repeated (tx, slot, resource), overwrites the RSRP.
  void record(SciRecord sci);
  /// Drops every record older than `slot`.
  void evict_before(SlotIndex slot);

  [[nodiscard]] std::size_t size() const { return records_.size(); }
  [[nodiscard]] bool empty() const { return records_.empty(); }
  [[nodiscard]] std::vector<const SciRecord*> in_range(SlotRange range) const;

  /// Reservations falling inside `window`, seen from the SCIs received in
  /// `sensing`. Periodic SCIs are repeated at k * P_rsvp for k = 1..Q;
  /// chained resources announced in a received SCI are also emitted as-is
  /// when they land inside the window.
  [[nodiscard]] std::vector<ProjectedReservation> project_reservations(
      const SelectionWindow& window, SlotRange sensing, const Numerology& numerology) const;

 private:
  using Key = std::tuple<SlotIndex, UeId, Resource>;
  std::map<Key, SciRecord> records_;
};

struct ExclusionSet {
  std::vector<Resource> excluded;    // sorted
  std::vector<Resource> candidates;  // window resources not excluded, in window order
  double threshold_dbm = 0.0;        // after escalation
  int escalations = 0;               // number of +3 dB steps
  std::size_t half_duplex_excluded = 0;
  std::size_t total = 0;

  [[nodiscard]] double candidate_fraction() const {
    return total == 0 ? 1.0 : static_cast<double>(candidates.size()) / static_cast<double>(total);
  }
};

inline constexpr double kThresholdStepDb = 3.0;

/// Candidate identification. A window resource is excluded when any
/// reservation overlapping it has RSRP at or above the threshold; while
/// fewer than x_percent of the window stays candidate the threshold is
/// raised by 3 dB and the pass is repeated.
///
/// `half_duplex_slots` (slots holding the UE's own scheduled transmissions)
/// removes whole slots up front. That step is skipped
/// if on its own it would leave less than x_percent of the window.
ExclusionSet build_exclusion(std::span<const Resource> window_resources,
                             std::span<const ProjectedReservation> reservations, int x_percent,
                             double initial_threshold_dbm,
                             std::span<const SlotIndex> half_duplex_slots = {});

/// Convenience composition over a sensing database.
ExclusionSet build_exclusion(const SensingDatabase& db, const SelectionWindow& window,
                             const PoolConfig& pool, const SidelinkPattern& pattern,
                             const Numerology& numerology, const SensingWindowSpec& spec,
                             int subchannels_per_tx, int x_percent, double initial_threshold_dbm);

}  // namespace nrsl
