#include "nrsl/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include "nrsl/errors.hpp"
#include "nrsl/mode2_mac.hpp"
#include "nrsl/phy.hpp"
#include "nrsl/scenario.hpp"
#include "nrsl/sensing.hpp"

namespace nrsl {

bool EventQueue::Later::operator()(const Event& a, const Event& b) const {
  return std::tie(a.slot, a.kind, a.seq) > std::tie(b.slot, b.kind, b.seq);
}

void EventQueue::push(SlotIndex slot, EventKind kind, UeId ue, std::uint64_t payload) {
  if (popped_ && std::tie(slot, kind) < std::tie(last_slot_, last_kind_)) {
    throw OutOfOrderEvent("event scheduled at slot " + std::to_string(slot) +
                          " after slot " + std::to_string(last_slot_) + " was processed");
  }
  heap_.push(Event{slot, kind, ue, payload, next_seq_++});
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  last_slot_ = e.slot;
  last_kind_ = e.kind;
  popped_ = true;
  return e;
}

namespace {

struct Packet {
  std::uint64_t id = 0;
  std::chrono::microseconds sent{0};
  SlotIndex arrival_slot = 0;
  std::vector<bool> delivered;  // per intended receiver
};

struct Transmitter {
  Transmitter(UeId id, std::chrono::microseconds start, std::uint64_t drop_seed)
      : ue(id),
        offset(start),
        selection_rng(drop_seed, id, StreamPurpose::Selection),
        slrrc_rng(drop_seed, id, StreamPurpose::Slrrc),
        keep_rng(drop_seed, id, StreamPurpose::Keep) {}

  UeId ue = 0;
  std::vector<UeId> receivers;
  std::chrono::microseconds offset{0};
  std::uint64_t next_packet = 0;
  std::deque<Packet> queue;
  SpsGrant grant;
  bool selection_pending = false;
  bool packet_on_air = false;  // head packet was sent in the current period
  SensingDatabase db;
  Rng selection_rng;
  Rng slrrc_rng;
  Rng keep_rng;
};

struct OnAir {
  UeId tx = 0;
  Resource resource;
  SciRecord sci;
  std::uint64_t packet_id = 0;
};

class Drop {
 public:
  Drop(const RunConfig& cfg, std::uint64_t drop_seed)
      : cfg_(cfg),
        num_(cfg.numerology()),
        pool_(cfg.pool()),
        pattern_(cfg.pattern()),
        end_slot_(cfg.duration_slots()),
        duration_(num_.slot_start(end_slot_)) {
    const auto ues = build_layout(cfg.layout);
    n_ues_ = ues.size();
    build_gains(ues, drop_seed);

    tx_index_.assign(n_ues_, -1);
    for (const auto& ue : ues) {
      if (ue.role != UeRole::Transmitter) {
        continue;
      }
      tx_index_[ue.id] = static_cast<int>(txs_.size());
      Rng offset_rng(drop_seed, ue.id, StreamPurpose::Offset);
      txs_.emplace_back(ue.id, draw_start_offset(cfg.start_offset_max_ms, offset_rng), drop_seed);
    }
    for (const auto& [tx, rx] : pir_pairs(ues, cfg.pir_pairing)) {
      trace_.register_pair(tx, rx);
      txs_[static_cast<std::size_t>(tx_index_[tx])].receivers.push_back(rx);
    }
  }

  KpiTrace run() {
    for (std::size_t i = 0; i < txs_.size(); ++i) {
      schedule_arrival(i);
    }
    while (!queue_.empty() && queue_.top().slot < end_slot_) {
      const Event e = queue_.pop();
      switch (e.kind) {
        case EventKind::TrafficArrival:
          on_arrival(e);
          break;
        case EventKind::SelectionTrigger:
          on_selection(e);
          break;
        case EventKind::Transmission:
          on_transmission(e);
          break;
        case EventKind::ReceptionResolution:
          on_reception(e.slot);
          break;
        case EventKind::KpiSample:
          on_period_end_event(e);
          break;
      }
    }
    return std::move(trace_);
  }

 private:
  void build_gains(const std::vector<UeState>& ues, std::uint64_t drop_seed) {
    // All vehicles share one velocity, so inter-UE distances stay constant
    // and the link budget is computed once per drop.
    gain_db_.assign(n_ues_ * n_ues_, 0.0);
    const double sigma = cfg_.radio.shadowing_sigma_db;
    for (std::size_t a = 0; a < n_ues_; ++a) {
      Rng shadow(drop_seed, static_cast<UeId>(a), StreamPurpose::Shadowing);
      for (std::size_t b = a + 1; b < n_ues_; ++b) {
        const double pl = pathloss_db(distance_m(ues[a].position, ues[b].position),
                                      cfg_.radio.carrier_ghz);
        const double s = sigma > 0.0 ? sigma * shadow.normal() : 0.0;
        const double g = -pl - s + 2.0 * cfg_.radio.antenna_gain_db;
        gain_db_[a * n_ues_ + b] = g;
        gain_db_[b * n_ues_ + a] = g;
      }
    }
  }

  [[nodiscard]] double rx_power_dbm(UeId tx, UeId rx) const {
    return cfg_.radio.tx_power_dbm + gain_db_[tx * n_ues_ + rx];
  }

  Transmitter& tx_of(UeId ue) { return txs_[static_cast<std::size_t>(tx_index_[ue])]; }

  void schedule_arrival(std::size_t i) {
    Transmitter& t = txs_[i];
    const auto at = t.offset + std::chrono::milliseconds{cfg_.inter_packet_ms} *
                                   static_cast<std::int64_t>(t.next_packet);
    if (at >= duration_) {
      return;
    }
    queue_.push(num_.first_slot_at_or_after(at), EventKind::TrafficArrival, t.ue, t.next_packet);
    ++t.next_packet;
  }

  void on_arrival(const Event& e) {
    Transmitter& t = tx_of(e.ue);
    const auto sent = t.offset + std::chrono::milliseconds{cfg_.inter_packet_ms} *
                                     static_cast<std::int64_t>(e.payload);
    t.queue.push_back(Packet{e.payload, sent, e.slot, std::vector<bool>(t.receivers.size())});
    trace_.counters().generated += t.receivers.size();
    schedule_arrival(static_cast<std::size_t>(tx_index_[e.ue]));
    request_selection(t, e.slot);
  }

  void request_selection(Transmitter& t, SlotIndex slot) {
    if (!t.grant.active() && !t.selection_pending) {
      t.selection_pending = true;
      queue_.push(slot, EventKind::SelectionTrigger, t.ue);
    }
  }

  void on_selection(const Event& e) {
    Transmitter& t = tx_of(e.ue);
    t.selection_pending = false;
    if (t.grant.active() || t.queue.empty()) {
      return;
    }
    const auto sensing = sensing_window(e.slot, cfg_.mac.sensing, num_);
    t.db.evict_before(sensing.range.begin);
    // Selection only runs without an active grant, so no own transmission
    // is scheduled ahead of `now`.
    const SelectionContext ctx{cfg_.mac, pool_, pattern_, num_, &t.db, {}};
    try {
      auto result = trigger_selection(ctx, e.slot, cfg_.mac.mode, t.selection_rng, t.slrrc_rng);
      t.grant = std::move(result.grant);
    } catch (const NoCandidates&) {
      fail_selection(t, e.slot);
      return;
    } catch (const EmptyWindow&) {
      fail_selection(t, e.slot);
      return;
    }
    schedule_period(t, e.slot);
  }

  void fail_selection(Transmitter& t, SlotIndex slot) {
    ++trace_.selection_failures;
    trace_.counters().lost += t.receivers.size();
    t.queue.pop_front();
    if (!t.queue.empty()) {
      request_selection(t, slot + 1);
    }
  }

  void schedule_period(Transmitter& t, SlotIndex now) {
    for (const auto& r : t.grant.resources) {
      if (r.slot < now || !pattern_.is_sidelink(r.slot)) {
        // A period that no longer maps onto sidelink slots ends the grant.
        t.grant = SpsGrant{};
        request_selection(t, now + 1);
        return;
      }
    }
    t.packet_on_air = false;
    for (std::size_t i = 0; i < t.grant.resources.size(); ++i) {
      queue_.push(t.grant.resources[i].slot, EventKind::Transmission, t.ue, i);
    }
    queue_.push(t.grant.resources.back().slot, EventKind::KpiSample, t.ue);
  }

  void on_transmission(const Event& e) {
    Transmitter& t = tx_of(e.ue);
    if (t.queue.empty() || t.queue.front().arrival_slot > e.slot) {
      return;  // nothing to send in this period
    }
    const auto& resources = t.grant.resources;
    const auto i = static_cast<std::size_t>(e.payload);
    const Resource& r = resources[i];
    const Packet& p = t.queue.front();
    t.packet_on_air = true;

    SciRecord sci;
    sci.tx_ue = t.ue;
    sci.slot = e.slot;
    sci.resource = r;
    sci.p_rsvp_ms = t.grant.p_rsvp_ms;
    const auto chained_end =
        std::min(resources.size(), i + static_cast<std::size_t>(cfg_.mac.n_max_reserve));
    for (std::size_t k = i + 1; k < chained_end; ++k) {
      sci.chained.push_back(resources[k]);
    }

    if (on_air_.empty() || on_air_slot_ != e.slot) {
      on_air_.clear();
      on_air_slot_ = e.slot;
      queue_.push(e.slot, EventKind::ReceptionResolution, t.ue);
    }
    on_air_.push_back(OnAir{t.ue, r, std::move(sci), p.id});
    trace_.record_pssch_tx(e.slot, t.ue, r, p.id);
  }

  [[nodiscard]] double bandwidth_hz(const Resource& r) const {
    return static_cast<double>(r.num_subchannels) * pool_.subchannel_size_rbs * 12.0 *
           num_.scs_khz() * 1e3;
  }

  void on_reception(SlotIndex slot) {
    std::vector<bool> transmitting(n_ues_, false);
    for (const auto& a : on_air_) {
      transmitting[a.tx] = true;
    }
    std::vector<double> interferers;
    for (UeId rx = 0; rx < n_ues_; ++rx) {
      if (transmitting[rx]) {
        continue;  // half duplex
      }
      for (const auto& a : on_air_) {
        interferers.clear();
        for (const auto& other : on_air_) {
          if (&other != &a && other.resource.overlaps(a.resource)) {
            interferers.push_back(rx_power_dbm(other.tx, rx));
          }
        }
        const double signal = rx_power_dbm(a.tx, rx);
        const double sinr = sinr_db(signal, interferers, noise_dbm(bandwidth_hz(a.resource), cfg_.radio));
        if (!decode(sinr, Channel::Pscch, cfg_.radio)) {
          continue;
        }
        if (tx_index_[rx] >= 0) {
          SciRecord sci = a.sci;
          sci.rsrp_dbm = rsrp_dbm(cfg_.radio.tx_power_dbm, -gain_db_[a.tx * n_ues_ + rx], 0.0);
          tx_of(rx).db.record(std::move(sci));
        }
        if (decode(sinr, Channel::Pssch, cfg_.radio)) {
          deliver(a, rx, slot);
        }
      }
    }
    on_air_.clear();
  }

  void deliver(const OnAir& a, UeId rx, SlotIndex slot) {
    Transmitter& t = tx_of(a.tx);
    const auto it = std::find(t.receivers.begin(), t.receivers.end(), rx);
    if (it == t.receivers.end() || t.queue.empty() || t.queue.front().id != a.packet_id) {
      return;
    }
    Packet& p = t.queue.front();
    const auto k = static_cast<std::size_t>(it - t.receivers.begin());
    if (p.delivered[k]) {
      return;
    }
    p.delivered[k] = true;
    ++trace_.counters().delivered;
    trace_.record_app_rx(num_.slot_start(slot + 1), a.tx, rx, p.id, p.sent);
  }

  void on_period_end_event(const Event& e) {
    Transmitter& t = tx_of(e.ue);
    if (t.packet_on_air) {
      const Packet& p = t.queue.front();
      trace_.counters().lost +=
          static_cast<std::uint64_t>(std::count(p.delivered.begin(), p.delivered.end(), false));
      t.queue.pop_front();
    }
    const auto decision = on_period_end(t.grant, t.slrrc_rng, t.keep_rng);
    if (decision == GrantDecision::Reselect) {
      if (!t.queue.empty()) {
        request_selection(t, e.slot + 1);
      }
      return;
    }
    schedule_period(t, e.slot + 1);
  }

  const RunConfig& cfg_;
  Numerology num_;
  PoolConfig pool_;
  SidelinkPattern pattern_;
  SlotIndex end_slot_;
  std::chrono::microseconds duration_;
  std::size_t n_ues_ = 0;
  std::vector<double> gain_db_;
  std::vector<int> tx_index_;
  std::vector<Transmitter> txs_;
  EventQueue queue_;
  std::vector<OnAir> on_air_;
  SlotIndex on_air_slot_ = -1;
  KpiTrace trace_;
};

}  // namespace

KpiTrace run_drop(const RunConfig& cfg, std::uint64_t drop_seed) {
  cfg.validate();
  return Drop(cfg, drop_seed).run();
}

DropKpi summarize_drop(const KpiTrace& trace, std::uint64_t drop_seed) {
  DropKpi k;
  k.drop_seed = drop_seed;
  k.pir = compute_pir(trace);
  k.simtx_slot_pct = simultaneous_pct(trace, SimultaneousScope::Slot);
  k.simtx_resource_pct = simultaneous_pct(trace, SimultaneousScope::Resource);
  k.counters = trace.counters();
  k.selection_failures = trace.selection_failures;
  return k;
}

std::vector<double> CampaignResult::pir_samples() const {
  std::vector<double> out;
  for (const auto& d : drops) {
    for (const auto& s : d.pir.samples) {
      out.push_back(s.value_ms);
    }
  }
  return out;
}

std::vector<double> CampaignResult::simtx_samples(SimultaneousScope scope) const {
  std::vector<double> out;
  out.reserve(drops.size());
  for (const auto& d : drops) {
    out.push_back(scope == SimultaneousScope::Slot ? d.simtx_slot_pct : d.simtx_resource_pct);
  }
  return out;
}

std::size_t CampaignResult::starved_pairs() const {
  std::size_t n = 0;
  for (const auto& d : drops) {
    n += d.pir.starved.size();
  }
  return n;
}

PacketCounters CampaignResult::counters() const {
  PacketCounters c;
  for (const auto& d : drops) {
    c.generated += d.counters.generated;
    c.delivered += d.counters.delivered;
    c.lost += d.counters.lost;
  }
  return c;
}

CampaignResult run_campaign(const RunConfig& cfg, int n_drops, int parallel, bool keep_traces) {
  cfg.validate();
  if (n_drops < 1) {
    throw ConfigError("n_drops must be >= 1");
  }
  const auto n = static_cast<std::size_t>(n_drops);
  CampaignResult result;
  result.drops.resize(n);
  if (keep_traces) {
    result.traces.resize(n);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const std::uint64_t seed = cfg.seed + i;
        const KpiTrace trace = Drop(cfg, seed).run();
        result.drops[i] = summarize_drop(trace, seed);
        if (keep_traces) {
          result.traces[i] = trace.serialize();
        }
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };

  const auto threads = static_cast<std::size_t>(std::clamp(parallel, 1, n_drops));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) {
      pool.emplace_back(worker);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw Error("median of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

nlohmann::json summarize_campaign(const CampaignResult& result, const RunConfig& cfg) {
  using nlohmann::json;
  json j;
  j["drops"] = result.drops.size();
  j["seed"] = cfg.seed;

  const auto pir = result.pir_samples();
  json p;
  p["samples"] = pir.size();
  p["starved_pairs"] = result.starved_pairs();
  p["ideal_ms"] = cfg.inter_packet_ms;
  if (pir.empty()) {
    p["median_ms"] = nullptr;
    p["ideal_fraction"] = nullptr;
  } else {
    p["median_ms"] = median(pir);
    const auto ideal = std::count_if(pir.begin(), pir.end(), [&](double v) {
      return std::abs(v - cfg.inter_packet_ms) < 1e-9;
    });
    p["ideal_fraction"] = static_cast<double>(ideal) / static_cast<double>(pir.size());
  }
  j["pir"] = p;

  json s;
  s["scope"] = to_string(cfg.simultaneous_scope);
  s["median_pct"] = median(result.simtx_samples(cfg.simultaneous_scope));
  s["median_pct_slot"] = median(result.simtx_samples(SimultaneousScope::Slot));
  s["median_pct_resource"] = median(result.simtx_samples(SimultaneousScope::Resource));
  j["simtx"] = s;

  const auto c = result.counters();
  std::uint64_t failures = 0;
  for (const auto& d : result.drops) {
    failures += d.selection_failures;
  }
  j["packets"] = {{"generated", c.generated},
                  {"delivered", c.delivered},
                  {"lost", c.lost},
                  {"in_flight", c.in_flight()},
                  {"selection_failures", failures}};
  j["config"] = to_json(cfg);
  return j;
}

void write_cell_outputs(const CampaignResult& result, const RunConfig& cfg,
                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto pir = result.pir_samples();
  if (pir.empty()) {
    std::ofstream(dir / "pir_cdf.csv") << "value,cdf\n";
  } else {
    export_cdf(pir, dir / "pir_cdf.csv");
  }
  const auto simtx = result.simtx_samples(cfg.simultaneous_scope);
  export_cdf(simtx, dir / "simtx_cdf.csv");
  {
    std::ofstream out(dir / "summary.json");
    out << summarize_campaign(result, cfg).dump(2) << '\n';
    if (!out) {
      throw Error("failed to write " + (dir / "summary.json").string());
    }
  }
  if (!result.traces.empty()) {
    std::filesystem::create_directories(dir / "traces");
    for (std::size_t i = 0; i < result.traces.size(); ++i) {
      std::ofstream out(dir / "traces" / ("drop-" + std::to_string(i) + ".txt"));
      out << result.traces[i];
    }
  }
}

}  // namespace nrsl
