#include "nrsl/scenario.hpp"

#include <cmath>
#include <string>

#include "nrsl/errors.hpp"

namespace nrsl {

void HighwayLayout::validate() const {
  if (lanes < 1 || ues_per_lane < 1) {
    throw InvalidLayout("lanes and ues_per_lane must be >= 1");
  }
  if (!(inter_vehicle_m > 0.0) || !(inter_lane_m > 0.0) || !(antenna_height_m > 0.0) ||
      !(speed_kmh >= 0.0)) {
    throw InvalidLayout("layout distances must be positive and speed non-negative");
  }
  if (tx_index) {
    if (*tx_index < 0 || *tx_index >= ues_per_lane) {
      throw InvalidLayout("transmitter index " + std::to_string(*tx_index) +
                          " out of range for " + std::to_string(ues_per_lane) + " UEs per lane");
    }
  } else if (ues_per_lane % 2 == 0) {
    throw InvalidLayout("an even number of UEs per lane has no centre vehicle; set tx_index");
  }
}

double distance_m(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

std::vector<UeState> build_layout(const HighwayLayout& layout) {
  layout.validate();
  const int tx = layout.tx_index.value_or(layout.ues_per_lane / 2);
  const double v = layout.speed_kmh / 3.6;
  std::vector<UeState> ues;
  ues.reserve(static_cast<std::size_t>(layout.lanes * layout.ues_per_lane));
  for (int lane = 0; lane < layout.lanes; ++lane) {
    const auto lane_tx = static_cast<UeId>(lane * layout.ues_per_lane + tx);
    for (int i = 0; i < layout.ues_per_lane; ++i) {
      UeState ue;
      ue.id = static_cast<UeId>(lane * layout.ues_per_lane + i);
      ue.lane = lane;
      ue.index_in_lane = i;
      ue.position = {i * layout.inter_vehicle_m, lane * layout.inter_lane_m,
                     layout.antenna_height_m};
      ue.velocity_mps = v;
      ue.role = i == tx ? UeRole::Transmitter : UeRole::Receiver;
      if (ue.role == UeRole::Receiver) {
        ue.lane_transmitter = lane_tx;
      }
      ues.push_back(ue);
    }
  }
  return ues;
}

std::vector<Position> positions_at(std::span<const UeState> ues, std::chrono::microseconds t) {
  const double seconds = static_cast<double>(t.count()) * 1e-6;
  std::vector<Position> out;
  out.reserve(ues.size());
  for (const auto& ue : ues) {
    Position p = ue.position;
    p.x += ue.velocity_mps * seconds;
    out.push_back(p);
  }
  return out;
}

std::vector<std::pair<UeId, UeId>> pir_pairs(std::span<const UeState> ues, PirPairing pairing) {
  std::vector<std::pair<UeId, UeId>> out;
  for (const auto& tx : ues) {
    if (tx.role != UeRole::Transmitter) {
      continue;
    }
    for (const auto& rx : ues) {
      if (rx.id == tx.id) {
        continue;
      }
      if (pairing == PirPairing::All || rx.lane_transmitter == tx.id) {
        out.emplace_back(tx.id, rx.id);
      }
    }
  }
  return out;
}

void TrafficSource::validate() const {
  if (packet_bytes <= 0) {
    throw ConfigError("packet_bytes must be positive");
  }
  if (inter_packet_ms < 1) {
    throw ConfigError("inter_packet_ms must be >= 1");
  }
}

std::vector<std::chrono::microseconds> generate_arrivals(const TrafficSource& src,
                                                         std::chrono::microseconds duration) {
  src.validate();
  const std::chrono::microseconds step = std::chrono::milliseconds{src.inter_packet_ms};
  std::vector<std::chrono::microseconds> out;
  for (auto t = src.start_offset; t < duration; t += step) {
    out.push_back(t);
  }
  return out;
}

std::chrono::microseconds draw_start_offset(int max_ms, Rng& rng) {
  if (max_ms <= 0) {
    return std::chrono::microseconds{0};
  }
  return std::chrono::microseconds{rng.uniform_int(0, std::int64_t{max_ms} * 1000 - 1)};
}

}  // namespace nrsl
