#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nrsl/rng.hpp"

namespace nrsl {

struct HighwayLayout {
  int lanes = 3;
  int ues_per_lane = 5;
  double inter_vehicle_m = 20.0;
  double inter_lane_m = 4.0;
  double antenna_height_m = 1.6;
  double speed_kmh = 140.0;
  // Transmitter position inside each lane; empty means the centre vehicle.
  std::optional<int> tx_index;

  void validate() const;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance_m(const Position& a, const Position& b);

enum class UeRole { Transmitter, Receiver };

struct UeState {
  UeId id = 0;
  int lane = 0;
  int index_in_lane = 0;
  Position position;  // at t = 0
  double velocity_mps = 0.0;
  UeRole role = UeRole::Receiver;
  std::optional<UeId> lane_transmitter;
};

/// Vehicles on straight lanes along +x: 20 m apart inside a lane, lanes 4 m
/// apart, all at the same speed. One transmitter per lane, the others are
/// that lane's platoon receivers. UE ids run lane-major.
std::vector<UeState> build_layout(const HighwayLayout& layout);

/// Constant-velocity kinematics: x(t) = x(0) + v t.
std::vector<Position> positions_at(std::span<const UeState> ues, std::chrono::microseconds t);

enum class PirPairing { Lane, All };

/// (tx, rx) pairs that define PIR samples. Lane pairing keeps each receiver
/// with its own lane's transmitter; All pairs every transmitter with every
/// other UE.
std::vector<std::pair<UeId, UeId>> pir_pairs(std::span<const UeState> ues, PirPairing pairing);

struct TrafficSource {
  int packet_bytes = 200;
  int inter_packet_ms = 100;
  std::chrono::microseconds start_offset{0};

  void validate() const;
};

/// start_offset + k * interval for every k with arrival < duration.
std::vector<std::chrono::microseconds> generate_arrivals(const TrafficSource& src,
                                                         std::chrono::microseconds duration);

/// Start offset uniform in [0, max_ms) at microsecond resolution.
std::chrono::microseconds draw_start_offset(int max_ms, Rng& rng);

}  // namespace nrsl
