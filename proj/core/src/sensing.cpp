#include "nrsl/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <unordered_map>

#include "nrsl/errors.hpp"

namespace nrsl {

int t_scal_ms(int t2_slots, const Numerology& numerology) {
  const auto per_ms = static_cast<int>(numerology.slots_per_ms());
  return (t2_slots + per_ms - 1) / per_ms;
}

int reservation_repeats(int t_scal, int p_rsvp_ms) {
  if (p_rsvp_ms <= 0) {
    return 0;
  }
  return (t_scal + p_rsvp_ms - 1) / p_rsvp_ms;
}

void SensingDatabase::record(SciRecord sci) {
  if (sci.p_rsvp_ms < 0 || sci.p_rsvp_ms > 1000) {
    throw Error("reservation period " + std::to_string(sci.p_rsvp_ms) + " ms out of range");
  }
  for (const auto& r : sci.chained) {
    if (r.slot < sci.slot || (r.slot == sci.slot && r.overlaps(sci.resource))) {
      throw Error("chained reservation must follow its SCI");
    }
  }
  Key key{sci.slot, sci.tx_ue, sci.resource};
  records_.insert_or_assign(std::move(key), std::move(sci));
}

void SensingDatabase::evict_before(SlotIndex slot) {
  auto it = records_.begin();
  while (it != records_.end() && std::get<0>(it->first) < slot) {
    it = records_.erase(it);
  }
}

std::vector<const SciRecord*> SensingDatabase::in_range(SlotRange range) const {
  std::vector<const SciRecord*> out;
  auto it = records_.lower_bound(Key{range.begin, 0, Resource{range.begin, 0, 0}});
  for (; it != records_.end() && std::get<0>(it->first) < range.end; ++it) {
    if (std::get<0>(it->first) >= range.begin) {
      out.push_back(&it->second);
    }
  }
  return out;
}

std::vector<ProjectedReservation> SensingDatabase::project_reservations(
    const SelectionWindow& window, SlotRange sensing, const Numerology& numerology) const {
  const SlotRange target = window.range();
  const int q_scal = t_scal_ms(window.t2_slots, numerology);
  std::vector<ProjectedReservation> out;
  for (const SciRecord* sci : in_range(sensing)) {
    for (const auto& r : sci->chained) {
      if (target.contains(r.slot)) {
        out.push_back({r, sci->rsrp_dbm, sci->tx_ue});
      }
    }
    const int q = reservation_repeats(q_scal, sci->p_rsvp_ms);
    const SlotIndex period = numerology.to_slots(std::chrono::milliseconds{sci->p_rsvp_ms});
    for (int k = 1; k <= q; ++k) {
      const auto emit = [&](const Resource& r) {
        const Resource moved = r.shifted(k * period);
        if (target.contains(moved.slot)) {
          out.push_back({moved, sci->rsrp_dbm, sci->tx_ue});
        }
      };
      emit(sci->resource);
      for (const auto& r : sci->chained) {
        emit(r);
      }
    }
  }
  return out;
}

namespace {

bool admissible_percent(std::size_t candidates, std::size_t total, int x_percent) {
  return candidates * 100 >= total * static_cast<std::size_t>(x_percent);
}

}  // namespace

ExclusionSet build_exclusion(std::span<const Resource> window_resources,
                             std::span<const ProjectedReservation> reservations, int x_percent,
                             double initial_threshold_dbm,
                             std::span<const SlotIndex> half_duplex_slots) {
  if (x_percent != 20 && x_percent != 35 && x_percent != 50) {
    throw ConfigError("x_percent must be 20, 35 or 50, got " + std::to_string(x_percent));
  }
  const std::size_t total = window_resources.size();

  std::vector<bool> blocked(total, false);
  std::size_t hd_count = 0;
  if (!half_duplex_slots.empty()) {
    const std::set<SlotIndex> slots(half_duplex_slots.begin(), half_duplex_slots.end());
    for (std::size_t i = 0; i < total; ++i) {
      if (slots.contains(window_resources[i].slot)) {
        blocked[i] = true;
        ++hd_count;
      }
    }
    if (!admissible_percent(total - hd_count, total, x_percent)) {
      std::fill(blocked.begin(), blocked.end(), false);
      hd_count = 0;
    }
  }

  // Strongest overlapping reservation per window resource.
  std::unordered_map<SlotIndex, std::vector<const ProjectedReservation*>> by_slot;
  for (const auto& r : reservations) {
    if (!std::isfinite(r.rsrp_dbm)) {
      throw Error("reservation RSRP must be finite");
    }
    by_slot[r.resource.slot].push_back(&r);
  }
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<double> strongest(total, kNone);
  for (std::size_t i = 0; i < total; ++i) {
    const auto it = by_slot.find(window_resources[i].slot);
    if (it == by_slot.end()) {
      continue;
    }
    for (const auto* r : it->second) {
      if (r->resource.overlaps(window_resources[i])) {
        strongest[i] = std::max(strongest[i], r->rsrp_dbm);
      }
    }
  }

  ExclusionSet out;
  out.total = total;
  out.half_duplex_excluded = hd_count;
  double threshold = initial_threshold_dbm;
  int steps = 0;
  for (;;) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < total; ++i) {
      if (!blocked[i] && !(strongest[i] >= threshold)) {
        ++kept;
      }
    }
    if (admissible_percent(kept, total, x_percent)) {
      break;
    }
    threshold += kThresholdStepDb;
    ++steps;
  }
  out.threshold_dbm = threshold;
  out.escalations = steps;
  for (std::size_t i = 0; i < total; ++i) {
    if (blocked[i] || strongest[i] >= threshold) {
      out.excluded.push_back(window_resources[i]);
    } else {
      out.candidates.push_back(window_resources[i]);
    }
  }
  std::sort(out.excluded.begin(), out.excluded.end());
  return out;
}

ExclusionSet build_exclusion(const SensingDatabase& db, const SelectionWindow& window,
                             const PoolConfig& pool, const SidelinkPattern& pattern,
                             const Numerology& numerology, const SensingWindowSpec& spec,
                             int subchannels_per_tx, int x_percent, double initial_threshold_dbm) {
  const auto resources = enumerate_window_resources(window, pool, pattern, subchannels_per_tx);
  const auto sensing = sensing_window(window.trigger_slot, spec, numerology);
  const auto reservations = db.project_reservations(window, sensing.range, numerology);
  return build_exclusion(resources, reservations, x_percent, initial_threshold_dbm);
}

}  // namespace nrsl
