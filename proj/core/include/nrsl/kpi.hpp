#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nrsl/pool.hpp"
#include "nrsl/rng.hpp"

namespace nrsl {

struct PsschTxRecord {
  SlotIndex slot = 0;
  UeId tx = 0;
  Resource resource;
  std::uint64_t packet_id = 0;
};

struct AppRxRecord {
  std::chrono::microseconds rx_time{0};
  UeId tx = 0;
  UeId rx = 0;
  std::uint64_t packet_id = 0;
  // Application timestamp carried by the packet (its generation time).
  std::chrono::microseconds sent_time{0};
};

/// Per (tx, rx) pair units: each generated packet counts once per
/// intended receiver.
struct PacketCounters {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;

  [[nodiscard]] std::uint64_t in_flight() const { return generated - delivered - lost; }
};

/// Everything one drop records for the two KPIs.
class KpiTrace {
 public:
  void register_pair(UeId tx, UeId rx);
  /// Throws OutOfOrderEvent when `slot` precedes the previous record.
  void record_pssch_tx(SlotIndex slot, UeId tx, const Resource& resource,
                       std::uint64_t packet_id = 0);
  /// Throws OutOfOrderEvent when `rx_time` precedes the previous record.
  void record_app_rx(std::chrono::microseconds rx_time, UeId tx, UeId rx,
                     std::uint64_t packet_id, std::chrono::microseconds sent_time);
  void record_app_rx(std::chrono::microseconds time, UeId tx, UeId rx, std::uint64_t packet_id) {
    record_app_rx(time, tx, rx, packet_id, time);
  }

  [[nodiscard]] const std::vector<std::pair<UeId, UeId>>& pairs() const { return pairs_; }
  [[nodiscard]] const std::vector<PsschTxRecord>& pssch_tx() const { return pssch_tx_; }
  [[nodiscard]] const std::vector<AppRxRecord>& app_rx() const { return app_rx_; }
  [[nodiscard]] PacketCounters& counters() { return counters_; }
  [[nodiscard]] const PacketCounters& counters() const { return counters_; }
  std::uint64_t selection_failures = 0;

  /// Canonical text form; byte-identical for identical traces.
  [[nodiscard]] std::string serialize() const;

 private:
  std::vector<std::pair<UeId, UeId>> pairs_;
  std::vector<PsschTxRecord> pssch_tx_;
  std::vector<AppRxRecord> app_rx_;
  PacketCounters counters_;
};

struct PirSample {
  UeId tx = 0;
  UeId rx = 0;
  double value_ms = 0.0;
};

struct PirResult {
  std::vector<PirSample> samples;
  // Registered pairs with fewer than two receptions.
  std::vector<std::pair<UeId, UeId>> starved;
};

/// Mean gap between consecutive successful receptions per registered pair.
/// Gaps are taken on the packets' application timestamps, so a lossless
/// pair of a 100 ms source scores exactly 100 ms.
PirResult compute_pir(const KpiTrace& trace);

enum class SimultaneousScope {
  Slot,      // another UE transmits in the same slot, any subchannel
  Resource,  // another UE transmits on an overlapping subchannel
};

/// 100 * (PSSCH transmissions sharing their slot with another UE's) / total.
/// Returns 0 for an empty trace.
double simultaneous_pct(const KpiTrace& trace, SimultaneousScope scope);

struct CdfPoint {
  double value = 0.0;
  double cdf = 0.0;

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

/// Right-continuous empirical CDF: one point per distinct value with
/// cdf = (#samples <= value) / N.
std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

/// Smallest value whose CDF reaches p (p in (0, 1]).
double quantile(std::span<const CdfPoint> cdf, double p);
/// CDF evaluated at x (0 below the first value).
double cdf_at(std::span<const CdfPoint> cdf, double x);

/// Writes `value,cdf` rows with shortest round-trip number formatting.
void export_cdf(std::span<const double> samples, const std::filesystem::path& path);
std::vector<CdfPoint> read_cdf(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace nrsl
