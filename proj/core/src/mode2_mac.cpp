#include "nrsl/mode2_mac.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nrsl/errors.hpp"

namespace nrsl {

int MacConfig::resources_per_period() const {
  return std::max(1, std::min({n_selected, n_max_reserve, n_pssch_max_tx}));
}

void MacConfig::validate() const {
  if (p_rsvp_ms < 1 || p_rsvp_ms > 1000) {
    throw ConfigError("p_rsvp_ms must be in [1, 1000]");
  }
  if (!(keep_probability >= 0.0 && keep_probability <= 1.0)) {
    throw ConfigError("keep_probability must be in [0, 1]");
  }
  if (n_selected < 1 || n_max_reserve < 1 || n_pssch_max_tx < 1) {
    throw ConfigError("n_selected, n_max_reserve and n_pssch_max_tx must be >= 1");
  }
  if (t1_slots < 0 || sensing.t_proc0_slots < 0 || sensing.t0_ms <= 0) {
    throw ConfigError("t1_slots and tproc0_slots must be >= 0 and t0_ms > 0");
  }
  if (t2_policy.value <= 0) {
    throw ConfigError("t2_policy.value must be positive");
  }
  if (x_percent != 20 && x_percent != 35 && x_percent != 50) {
    throw ConfigError("x_percent must be one of 20, 35, 50");
  }
  if (subchannels_per_tx < 0) {
    throw ConfigError("subchannels_per_tx must be >= 0 (0 = whole pool)");
  }
}

std::pair<int, int> slrrc_bounds(int p_rsvp_ms) {
  if (p_rsvp_ms >= 100) {
    return {5, 15};
  }
  const int p = std::max(20, p_rsvp_ms);
  // ceil(k * 100 / p)
  return {(5 * 100 + p - 1) / p, (15 * 100 + p - 1) / p};
}

int draw_slrrc(int p_rsvp_ms, Rng& rng) {
  const auto [lo, hi] = slrrc_bounds(p_rsvp_ms);
  return static_cast<int>(rng.uniform_int(lo, hi));
}

std::vector<Resource> select_resources(std::span<const Resource> candidates, int n_tx, Rng& rng) {
  if (candidates.empty()) {
    throw NoCandidates("no candidate resources left in the selection window");
  }
  const auto want = static_cast<std::size_t>(std::max(1, n_tx));
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<Resource> picked;
  for (std::size_t i = 0; i < order.size() && picked.size() < want; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(order.size() - i));
    std::swap(order[i], order[j]);
    const Resource& r = candidates[order[i]];
    const bool clash = std::any_of(picked.begin(), picked.end(),
                                   [&](const Resource& p) { return p.overlaps(r); });
    if (!clash) {
      picked.push_back(r);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

SelectionResult trigger_selection(const SelectionContext& ctx, SlotIndex now,
                                  SelectionMode mode, Rng& selection_rng, Rng& slrrc_rng) {
  const MacConfig& mac = ctx.mac;
  SelectionResult out;
  out.window.trigger_slot = now;
  out.window.t1_slots = mac.t1_slots;
  out.window.t2_slots =
      resolve_t2(mac.pdb_ms, mac.t2_min_slots, mac.t1_slots, ctx.numerology, mac.t2_policy);

  const int width =
      mac.subchannels_per_tx == 0 ? ctx.pool.subchannel_count() : mac.subchannels_per_tx;
  const auto resources = enumerate_window_resources(out.window, ctx.pool, ctx.pattern, width);

  if (mode == SelectionMode::Sensing && ctx.sensing_db != nullptr) {
    const auto sensing = sensing_window(now, mac.sensing, ctx.numerology);
    const auto reservations =
        ctx.sensing_db->project_reservations(out.window, sensing.range, ctx.numerology);
    const auto half_duplex =
        mac.exclude_own_tx_slots ? ctx.own_scheduled_slots : std::span<const SlotIndex>{};
    out.exclusion = build_exclusion(resources, reservations, mac.x_percent,
                                    mac.rsrp_threshold_dbm, half_duplex);
  } else {
    out.exclusion.total = resources.size();
    out.exclusion.candidates = resources;
    out.exclusion.threshold_dbm = mac.rsrp_threshold_dbm;
  }

  SpsGrant& g = out.grant;
  g.resources = select_resources(out.exclusion.candidates, mac.resources_per_period(),
                                 selection_rng);
  g.p_rsvp_ms = mac.p_rsvp_ms;
  g.period_slots = ctx.numerology.to_slots(std::chrono::milliseconds{mac.p_rsvp_ms});
  g.slrrc = draw_slrrc(mac.p_rsvp_ms, slrrc_rng);
  g.initial_slrrc = g.slrrc;
  g.cresel_remaining = 10 * g.slrrc;
  g.keep_probability = mac.keep_probability;
  g.selected_at = now;
  return out;
}

GrantDecision on_period_end(SpsGrant& grant, Rng& slrrc_rng, Rng& keep_rng) {
  grant.slrrc -= 1;
  grant.cresel_remaining -= 1;
  grant.periods_served += 1;

  GrantDecision decision = GrantDecision::Continue;
  if (grant.cresel_remaining <= 0) {
    decision = GrantDecision::Reselect;
  } else if (grant.slrrc <= 0) {
    if (keep_rng.bernoulli(grant.keep_probability)) {
      grant.slrrc = draw_slrrc(grant.p_rsvp_ms, slrrc_rng);
      decision = GrantDecision::Keep;
    } else {
      decision = GrantDecision::Reselect;
    }
  }

  if (decision == GrantDecision::Reselect) {
    grant.resources.clear();
    grant.slrrc = 0;
  } else {
    for (auto& r : grant.resources) {
      r = r.shifted(grant.period_slots);
    }
  }
  return decision;
}

}  // namespace nrsl
