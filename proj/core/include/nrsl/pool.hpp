#pragma once

#include <compare>
#include <vector>

#include "nrsl/timeline.hpp"

namespace nrsl {

struct PoolConfig {
  int bandwidth_rbs = 216;
  int subchannel_size_rbs = 50;
  int pscch_symbols = 1;
  int pssch_symbols = 12;

  [[nodiscard]] int subchannel_count() const;
  void validate() const;
};

/// Allocation unit: a run of contiguous subchannels in one sidelink slot.
struct Resource {
  SlotIndex slot = 0;
  int subchannel = 0;
  int num_subchannels = 1;

  [[nodiscard]] bool overlaps(const Resource& other) const {
    return slot == other.slot && subchannel < other.subchannel + other.num_subchannels &&
           other.subchannel < subchannel + num_subchannels;
  }
  [[nodiscard]] Resource shifted(SlotIndex slots) const {
    return {slot + slots, subchannel, num_subchannels};
  }

  friend auto operator<=>(const Resource&, const Resource&) = default;
};

/// Resource selection window [trigger + T1, trigger + T2] (both ends inclusive).
struct SelectionWindow {
  SlotIndex trigger_slot = 0;
  int t1_slots = 2;
  int t2_slots = 17;

  [[nodiscard]] SlotRange range() const {
    return {trigger_slot + t1_slots, trigger_slot + t2_slots + 1};
  }
  [[nodiscard]] int length_slots() const { return t2_slots - t1_slots + 1; }
};

struct SensingWindowSpec {
  int t0_ms = 100;
  int t_proc0_slots = 2;
};

/// Sensing interval [n - T0, n - Tproc0). `truncated` is set during warm-up
/// when fewer than T0 worth of slots exist before the trigger.
struct SensingWindow {
  SlotRange range;
  bool truncated = false;
};

enum class T2Mode {
  FixedInTime,   // value is the selection window length in ms
  FixedInSlots,  // value is T2 in slots
};

struct T2Policy {
  T2Mode mode = T2Mode::FixedInTime;
  int value = 16;

  friend bool operator==(const T2Policy&, const T2Policy&) = default;
};

/// Resolves T2 in slots. A fixed-in-time policy of L ms maps to
/// T2 = T1 + L * 2^mu - 1 so that the window spans exactly L ms; a
/// fixed-in-slots policy is taken as T2 directly. The value is then clamped
/// into [T2min, PDB], or set to PDB when PDB <= T2min.
int resolve_t2(int pdb_ms, int t2_min_slots, int t1_slots, const Numerology& numerology,
               T2Policy policy);

SensingWindow sensing_window(SlotIndex trigger_slot, const SensingWindowSpec& spec,
                             const Numerology& numerology);

/// Every (sidelink slot, subchannel start) pair in the window, slot-major.
/// Throws EmptyWindow when no sidelink slot falls inside.
std::vector<Resource> enumerate_window_resources(const SelectionWindow& window,
                                                 const PoolConfig& pool,
                                                 const SidelinkPattern& pattern,
                                                 int subchannels_per_tx = 1);

}  // namespace nrsl
