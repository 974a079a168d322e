#include "nrsl/phy.hpp"

#include <algorithm>
#include <cmath>

#include "nrsl/errors.hpp"

namespace nrsl {

void RadioConfig::validate() const {
  const bool finite = std::isfinite(tx_power_dbm) && std::isfinite(noise_figure_db) &&
                      std::isfinite(noise_psd_dbm_hz) && std::isfinite(antenna_gain_db) &&
                      std::isfinite(pscch_sinr_threshold_db) &&
                      std::isfinite(pssch_sinr_threshold_db);
  if (!finite) {
    throw ConfigError("radio parameters must be finite");
  }
  if (!(carrier_ghz > 0.0)) {
    throw ConfigError("carrier_ghz must be positive");
  }
  if (!(shadowing_sigma_db >= 0.0)) {
    throw ConfigError("shadowing_sigma_db must be >= 0");
  }
}

double pathloss_db(double distance_m, double carrier_ghz) {
  const double d = std::max(distance_m, kMinDistanceM);
  return 32.4 + 20.0 * std::log10(d) + 20.0 * std::log10(carrier_ghz);
}

double rsrp_dbm(double tx_power_dbm, double pathloss_db, double gains_db) {
  return tx_power_dbm - pathloss_db + gains_db;
}

double noise_dbm(double bandwidth_hz, const RadioConfig& radio) {
  return radio.noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + radio.noise_figure_db;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double sinr_db(double signal_dbm, std::span<const double> interferers_dbm, double noise_dbm) {
  double denom = dbm_to_mw(noise_dbm);
  for (double i : interferers_dbm) {
    denom += dbm_to_mw(i);
  }
  return mw_to_dbm(dbm_to_mw(signal_dbm) / denom);
}

bool decode(double sinr_db, Channel channel, const RadioConfig& radio) {
  const double threshold = channel == Channel::Pscch ? radio.pscch_sinr_threshold_db
                                                     : radio.pssch_sinr_threshold_db;
  return sinr_db >= threshold;
}

}  // namespace nrsl
