#include "nrsl/pool.hpp"

#include <algorithm>
#include <string>

#include "nrsl/errors.hpp"

namespace nrsl {

int PoolConfig::subchannel_count() const {
  return subchannel_size_rbs > 0 ? bandwidth_rbs / subchannel_size_rbs : 0;
}

void PoolConfig::validate() const {
  if (subchannel_size_rbs <= 0 || bandwidth_rbs <= 0) {
    throw ConfigError("pool bandwidth and subchannel size must be positive");
  }
  if (subchannel_count() < 1) {
    throw ConfigError("pool of " + std::to_string(bandwidth_rbs) +
                      " RBs holds no subchannel of " + std::to_string(subchannel_size_rbs) +
                      " RBs");
  }
  // One guard symbol out of 14.
  if (pscch_symbols < 0 || pssch_symbols < 1 || pscch_symbols + pssch_symbols > 13) {
    throw ConfigError("PSCCH + PSSCH symbols must fit in 13 symbols");
  }
}

int resolve_t2(int pdb_ms, int t2_min_slots, int t1_slots, const Numerology& numerology,
               T2Policy policy) {
  if (pdb_ms <= 0) {
    throw InfeasibleWindow("packet delay budget must be positive");
  }
  const auto pdb_slots = static_cast<int>(numerology.to_slots(std::chrono::milliseconds{pdb_ms}));
  int t2 = 0;
  if (pdb_slots <= t2_min_slots) {
    t2 = pdb_slots;
  } else {
    int requested = 0;
    switch (policy.mode) {
      case T2Mode::FixedInTime:
        requested = t1_slots +
                    static_cast<int>(numerology.to_slots(std::chrono::milliseconds{policy.value})) -
                    1;
        break;
      case T2Mode::FixedInSlots:
        requested = policy.value;
        break;
    }
    t2 = std::clamp(requested, t2_min_slots, pdb_slots);
  }
  if (t2 < t1_slots) {
    throw InfeasibleWindow("T2=" + std::to_string(t2) + " slots is below T1=" +
                           std::to_string(t1_slots) + " slots");
  }
  return t2;
}

SensingWindow sensing_window(SlotIndex trigger_slot, const SensingWindowSpec& spec,
                             const Numerology& numerology) {
  const SlotIndex t0 = numerology.to_slots(std::chrono::milliseconds{spec.t0_ms});
  SensingWindow w;
  w.range.begin = trigger_slot - t0;
  w.range.end = trigger_slot - spec.t_proc0_slots;
  if (w.range.begin < 0) {
    w.range.begin = 0;
    w.truncated = true;
  }
  if (w.range.end < w.range.begin) {
    w.range.end = w.range.begin;
  }
  return w;
}

std::vector<Resource> enumerate_window_resources(const SelectionWindow& window,
                                                 const PoolConfig& pool,
                                                 const SidelinkPattern& pattern,
                                                 int subchannels_per_tx) {
  const int count = pool.subchannel_count();
  if (subchannels_per_tx < 1 || subchannels_per_tx > count) {
    throw ConfigError("a transmission needs between 1 and " + std::to_string(count) +
                      " subchannels, got " + std::to_string(subchannels_per_tx));
  }
  const auto slots = pattern.enumerate(window.range());
  if (slots.empty()) {
    throw EmptyWindow("selection window [" + std::to_string(window.range().begin) + ", " +
                      std::to_string(window.range().end) + ") holds no sidelink slot");
  }
  std::vector<Resource> out;
  out.reserve(slots.size() * static_cast<std::size_t>(count - subchannels_per_tx + 1));
  for (SlotIndex s : slots) {
    for (int sc = 0; sc + subchannels_per_tx <= count; ++sc) {
      out.push_back({s, sc, subchannels_per_tx});
    }
  }
  return out;
}

}  // namespace nrsl
