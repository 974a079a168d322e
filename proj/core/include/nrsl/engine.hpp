#pragma once

#include <cstdint>
#include <filesystem>
#include <queue>
#include <vector>

#include <nlohmann/json.hpp>

#include "nrsl/config.hpp"
#include "nrsl/kpi.hpp"

namespace nrsl {

/// Same-slot events pop in this order.
enum class EventKind : std::uint8_t {
  TrafficArrival = 0,
  SelectionTrigger = 1,
  Transmission = 2,
  ReceptionResolution = 3,
  KpiSample = 4,
};

struct Event {
  SlotIndex slot = 0;
  EventKind kind = EventKind::TrafficArrival;
  UeId ue = 0;
  std::uint64_t payload = 0;
  std::uint64_t seq = 0;  // insertion order, breaks remaining ties
};

/// Min-queue on (slot, kind, seq). Pushing an event before the last popped
/// one throws OutOfOrderEvent.
class EventQueue {
 public:
  void push(SlotIndex slot, EventKind kind, UeId ue, std::uint64_t payload = 0);
  Event pop();
  [[nodiscard]] const Event& top() const { return heap_.top(); }
  [[nodiscard]] bool empty() const { return heap_.empty(); }
  [[nodiscard]] std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const;
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  SlotIndex last_slot_ = 0;
  EventKind last_kind_ = EventKind::TrafficArrival;
  bool popped_ = false;
};

/// Simulates one drop of `cfg` and returns its trace.
KpiTrace run_drop(const RunConfig& cfg, std::uint64_t drop_seed);

/// KPIs reduced from one drop's trace.
struct DropKpi {
  std::uint64_t drop_seed = 0;
  PirResult pir;
  double simtx_slot_pct = 0.0;
  double simtx_resource_pct = 0.0;
  PacketCounters counters;
  std::uint64_t selection_failures = 0;
};

DropKpi summarize_drop(const KpiTrace& trace, std::uint64_t drop_seed);

struct CampaignResult {
  std::vector<DropKpi> drops;
  // Serialized traces in drop order; only filled when requested.
  std::vector<std::string> traces;

  [[nodiscard]] std::vector<double> pir_samples() const;
  [[nodiscard]] std::vector<double> simtx_samples(SimultaneousScope scope) const;
  [[nodiscard]] std::size_t starved_pairs() const;
  [[nodiscard]] PacketCounters counters() const;
};

/// Drop i uses seed cfg.seed + i. Drops are distributed over `parallel`
/// worker threads; results are stored by drop index so the outcome does not
/// depend on the thread count.
CampaignResult run_campaign(const RunConfig& cfg, int n_drops, int parallel = 1,
                            bool keep_traces = false);

double median(std::vector<double> values);

/// summary.json content for one cell.
nlohmann::json summarize_campaign(const CampaignResult& result, const RunConfig& cfg);

/// Writes pir_cdf.csv, simtx_cdf.csv, summary.json and, if present,
/// traces/drop-<i>.txt under `dir`.
void write_cell_outputs(const CampaignResult& result, const RunConfig& cfg,
                        const std::filesystem::path& dir);

}  // namespace nrsl
