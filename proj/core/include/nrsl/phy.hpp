#pragma once

#include <span>

namespace nrsl {

struct RadioConfig {
  double carrier_ghz = 5.89;
  double tx_power_dbm = 23.0;
  double noise_figure_db = 5.0;
  double noise_psd_dbm_hz = -174.0;
  // Scalar stand-in for the UE antenna array, applied at both ends.
  double antenna_gain_db = 0.0;
  double pscch_sinr_threshold_db = 0.0;
  double pssch_sinr_threshold_db = 12.0;
  // Lognormal per-link shadowing, frozen for a drop. 0 disables it.
  double shadowing_sigma_db = 0.0;

  void validate() const;
};

enum class Channel { Pscch, Pssch };

inline constexpr double kMinDistanceM = 1.0;

/// LOS log-distance pathloss, 32.4 + 20 log10(d) + 20 log10(f_GHz).
/// Distances below 1 m are clamped.
double pathloss_db(double distance_m, double carrier_ghz);

double rsrp_dbm(double tx_power_dbm, double pathloss_db, double gains_db);

/// Thermal noise plus noise figure over `bandwidth_hz`.
double noise_dbm(double bandwidth_hz, const RadioConfig& radio);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

double sinr_db(double signal_dbm, std::span<const double> interferers_dbm, double noise_dbm);

/// Threshold decoder: success iff SINR >= the channel's threshold.
bool decode(double sinr_db, Channel channel, const RadioConfig& radio);

}  // namespace nrsl
