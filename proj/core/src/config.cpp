#include "nrsl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "nrsl/errors.hpp"

namespace nrsl {

using nlohmann::json;

PoolConfig RunConfig::pool() const {
  PoolConfig p;
  p.bandwidth_rbs = bandwidth_rbs_per_mu.at(static_cast<std::size_t>(numerology().mu()));
  p.subchannel_size_rbs = subchannel_size_rbs;
  p.pscch_symbols = pscch_symbols;
  p.pssch_symbols = pssch_symbols;
  return p;
}

SidelinkPattern RunConfig::pattern() const { return SidelinkPattern::parse(tdd_pattern, sl_bitmap); }

std::int64_t RunConfig::duration_slots() const {
  const auto us = static_cast<std::int64_t>(std::llround(duration_s * 1e6));
  return us / numerology().slot_duration().count();
}

int RunConfig::subchannels_per_tx() const {
  return mac.subchannels_per_tx == 0 ? pool().subchannel_count() : mac.subchannels_per_tx;
}

void RunConfig::validate() const {
  const Numerology num = numerology();
  const PoolConfig p = pool();
  p.validate();
  (void)pattern();
  mac.validate();
  radio.validate();
  layout.validate();
  TrafficSource{packet_bytes, inter_packet_ms, {}}.validate();
  if (!(duration_s > 0.0)) {
    throw ConfigError("duration_s must be positive");
  }
  if (duration_s * 1000.0 <= mac.sensing.t0_ms) {
    throw ConfigError("duration_s must exceed the sensing window T0");
  }
  if (n_drops < 1) {
    throw ConfigError("n_drops must be >= 1");
  }
  if (start_offset_max_ms < 0) {
    throw ConfigError("start_offset_max_ms must be >= 0");
  }
  if (mac.subchannels_per_tx > p.subchannel_count()) {
    throw ConfigError("subchannels_per_tx exceeds the pool's " +
                      std::to_string(p.subchannel_count()) + " subchannels");
  }
  (void)resolve_t2(mac.pdb_ms, mac.t2_min_slots, mac.t1_slots, num, mac.t2_policy);
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) {
    return std::string(v);
  }
  return std::nullopt;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mu",
      "seed",
      "duration_s",
      "n_drops",
      "tdd_pattern",
      "sl_bitmap",
      "bandwidth_rbs_per_mu",
      "subchannel_size_rbs",
      "subchannels_per_tx",
      "pscch_symbols",
      "pssch_symbols",
      "t1_slots",
      "t2_policy",
      "t2_min_slots",
      "pdb_ms",
      "t0_ms",
      "tproc0_slots",
      "x_percent",
      "rsrp_threshold_dbm",
      "n_max_reserve",
      "exclude_own_tx_slots",
      "mode",
      "p_rsvp_ms",
      "keep_probability",
      "n_selected",
      "n_pssch_max_tx",
      "carrier_ghz",
      "tx_power_dbm",
      "noise_figure_db",
      "noise_psd_dbm_hz",
      "antenna_gain_db",
      "pssch_sinr_threshold_db",
      "pscch_sinr_threshold_db",
      "shadowing_sigma_db",
      "lanes",
      "ues_per_lane",
      "tx_index",
      "inter_vehicle_m",
      "inter_lane_m",
      "antenna_height_m",
      "speed_kmh",
      "packet_bytes",
      "inter_packet_ms",
      "start_offset_max_ms",
      "pir_pairing",
      "simultaneous_scope",
  };
  return keys;
}

void apply_env_overrides(json& doc, const EnvLookup& lookup) {
  for (const auto& key : config_keys()) {
    std::string var(kEnvPrefix);
    for (char c : key) {
      var.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    const auto value = lookup(var);
    if (!value) {
      continue;
    }
    json parsed = json::parse(*value, nullptr, /*allow_exceptions=*/false);
    doc[key] = parsed.is_discarded() ? json(*value) : parsed;
  }
}

namespace {

SelectionMode parse_mode(const std::string& s) {
  if (s == "sensing") {
    return SelectionMode::Sensing;
  }
  if (s == "no_sensing" || s == "noSensing" || s == "nosensing") {
    return SelectionMode::NoSensing;
  }
  throw ConfigError("mode must be \"sensing\" or \"no_sensing\", got \"" + s + "\"");
}

T2Policy parse_t2_policy(const json& j) {
  if (!j.is_object() || !j.contains("mode") || !j.contains("value")) {
    throw ConfigError("t2_policy must be an object {\"mode\": \"ms\"|\"slots\", \"value\": N}");
  }
  T2Policy p;
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "ms") {
    p.mode = T2Mode::FixedInTime;
  } else if (mode == "slots") {
    p.mode = T2Mode::FixedInSlots;
  } else {
    throw ConfigError("t2_policy.mode must be \"ms\" or \"slots\"");
  }
  p.value = j.at("value").get<int>();
  return p;
}

PirPairing parse_pairing(const std::string& s) {
  if (s == "lane") {
    return PirPairing::Lane;
  }
  if (s == "all") {
    return PirPairing::All;
  }
  throw ConfigError("pir_pairing must be \"lane\" or \"all\"");
}

SimultaneousScope parse_scope(const std::string& s) {
  if (s == "slot") {
    return SimultaneousScope::Slot;
  }
  if (s == "resource") {
    return SimultaneousScope::Resource;
  }
  throw ConfigError("simultaneous_scope must be \"slot\" or \"resource\"");
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (auto it = doc.find(key); it != doc.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

}  // namespace

std::string to_string(SelectionMode mode) {
  return mode == SelectionMode::Sensing ? "sensing" : "no_sensing";
}
std::string to_string(T2Mode mode) { return mode == T2Mode::FixedInTime ? "ms" : "slots"; }
std::string to_string(PirPairing pairing) { return pairing == PirPairing::Lane ? "lane" : "all"; }
std::string to_string(SimultaneousScope scope) {
  return scope == SimultaneousScope::Slot ? "slot" : "resource";
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("configuration must be a JSON object");
  }
  const auto& known = config_keys();
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }

  RunConfig c;
  read(doc, "mu", c.mu);
  read(doc, "seed", c.seed);
  read(doc, "duration_s", c.duration_s);
  read(doc, "n_drops", c.n_drops);
  read(doc, "tdd_pattern", c.tdd_pattern);
  read(doc, "sl_bitmap", c.sl_bitmap);
  if (auto it = doc.find("bandwidth_rbs_per_mu"); it != doc.end()) {
    if (!it->is_array() || it->size() != 3) {
      throw ConfigError("bandwidth_rbs_per_mu must list three RB counts (mu 0, 1, 2)");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      c.bandwidth_rbs_per_mu[i] = (*it)[i].get<int>();
    }
  }
  read(doc, "subchannel_size_rbs", c.subchannel_size_rbs);
  read(doc, "pscch_symbols", c.pscch_symbols);
  read(doc, "pssch_symbols", c.pssch_symbols);

  MacConfig& m = c.mac;
  read(doc, "subchannels_per_tx", m.subchannels_per_tx);
  read(doc, "t1_slots", m.t1_slots);
  if (auto it = doc.find("t2_policy"); it != doc.end()) {
    m.t2_policy = parse_t2_policy(*it);
  }
  read(doc, "t2_min_slots", m.t2_min_slots);
  read(doc, "pdb_ms", m.pdb_ms);
  read(doc, "t0_ms", m.sensing.t0_ms);
  read(doc, "tproc0_slots", m.sensing.t_proc0_slots);
  read(doc, "x_percent", m.x_percent);
  read(doc, "rsrp_threshold_dbm", m.rsrp_threshold_dbm);
  read(doc, "n_max_reserve", m.n_max_reserve);
  read(doc, "exclude_own_tx_slots", m.exclude_own_tx_slots);
  if (auto it = doc.find("mode"); it != doc.end()) {
    m.mode = parse_mode(it->get<std::string>());
  }
  read(doc, "p_rsvp_ms", m.p_rsvp_ms);
  read(doc, "keep_probability", m.keep_probability);
  read(doc, "n_selected", m.n_selected);
  read(doc, "n_pssch_max_tx", m.n_pssch_max_tx);

  RadioConfig& r = c.radio;
  read(doc, "carrier_ghz", r.carrier_ghz);
  read(doc, "tx_power_dbm", r.tx_power_dbm);
  read(doc, "noise_figure_db", r.noise_figure_db);
  read(doc, "noise_psd_dbm_hz", r.noise_psd_dbm_hz);
  read(doc, "antenna_gain_db", r.antenna_gain_db);
  read(doc, "pssch_sinr_threshold_db", r.pssch_sinr_threshold_db);
  read(doc, "pscch_sinr_threshold_db", r.pscch_sinr_threshold_db);
  read(doc, "shadowing_sigma_db", r.shadowing_sigma_db);

  HighwayLayout& l = c.layout;
  read(doc, "lanes", l.lanes);
  read(doc, "ues_per_lane", l.ues_per_lane);
  if (auto it = doc.find("tx_index"); it != doc.end() && !it->is_null()) {
    l.tx_index = it->get<int>();
  }
  read(doc, "inter_vehicle_m", l.inter_vehicle_m);
  read(doc, "inter_lane_m", l.inter_lane_m);
  read(doc, "antenna_height_m", l.antenna_height_m);
  read(doc, "speed_kmh", l.speed_kmh);

  read(doc, "packet_bytes", c.packet_bytes);
  read(doc, "inter_packet_ms", c.inter_packet_ms);
  read(doc, "start_offset_max_ms", c.start_offset_max_ms);
  if (auto it = doc.find("pir_pairing"); it != doc.end()) {
    c.pir_pairing = parse_pairing(it->get<std::string>());
  }
  if (auto it = doc.find("simultaneous_scope"); it != doc.end()) {
    c.simultaneous_scope = parse_scope(it->get<std::string>());
  }
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["mu"] = c.mu;
  j["seed"] = c.seed;
  j["duration_s"] = c.duration_s;
  j["n_drops"] = c.n_drops;
  j["tdd_pattern"] = c.tdd_pattern;
  j["sl_bitmap"] = c.sl_bitmap;
  j["bandwidth_rbs_per_mu"] = c.bandwidth_rbs_per_mu;
  j["subchannel_size_rbs"] = c.subchannel_size_rbs;
  j["subchannels_per_tx"] = c.mac.subchannels_per_tx;
  j["pscch_symbols"] = c.pscch_symbols;
  j["pssch_symbols"] = c.pssch_symbols;
  j["t1_slots"] = c.mac.t1_slots;
  j["t2_policy"] = {{"mode", to_string(c.mac.t2_policy.mode)}, {"value", c.mac.t2_policy.value}};
  j["t2_min_slots"] = c.mac.t2_min_slots;
  j["pdb_ms"] = c.mac.pdb_ms;
  j["t0_ms"] = c.mac.sensing.t0_ms;
  j["tproc0_slots"] = c.mac.sensing.t_proc0_slots;
  j["x_percent"] = c.mac.x_percent;
  j["rsrp_threshold_dbm"] = c.mac.rsrp_threshold_dbm;
  j["n_max_reserve"] = c.mac.n_max_reserve;
  j["exclude_own_tx_slots"] = c.mac.exclude_own_tx_slots;
  j["mode"] = to_string(c.mac.mode);
  j["p_rsvp_ms"] = c.mac.p_rsvp_ms;
  j["keep_probability"] = c.mac.keep_probability;
  j["n_selected"] = c.mac.n_selected;
  j["n_pssch_max_tx"] = c.mac.n_pssch_max_tx;
  j["carrier_ghz"] = c.radio.carrier_ghz;
  j["tx_power_dbm"] = c.radio.tx_power_dbm;
  j["noise_figure_db"] = c.radio.noise_figure_db;
  j["noise_psd_dbm_hz"] = c.radio.noise_psd_dbm_hz;
  j["antenna_gain_db"] = c.radio.antenna_gain_db;
  j["pssch_sinr_threshold_db"] = c.radio.pssch_sinr_threshold_db;
  j["pscch_sinr_threshold_db"] = c.radio.pscch_sinr_threshold_db;
  j["shadowing_sigma_db"] = c.radio.shadowing_sigma_db;
  j["lanes"] = c.layout.lanes;
  j["ues_per_lane"] = c.layout.ues_per_lane;
  j["tx_index"] = c.layout.tx_index ? json(*c.layout.tx_index) : json(nullptr);
  j["inter_vehicle_m"] = c.layout.inter_vehicle_m;
  j["inter_lane_m"] = c.layout.inter_lane_m;
  j["antenna_height_m"] = c.layout.antenna_height_m;
  j["speed_kmh"] = c.layout.speed_kmh;
  j["packet_bytes"] = c.packet_bytes;
  j["inter_packet_ms"] = c.inter_packet_ms;
  j["start_offset_max_ms"] = c.start_offset_max_ms;
  j["pir_pairing"] = to_string(c.pir_pairing);
  j["simultaneous_scope"] = to_string(c.simultaneous_scope);
  return j;
}

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

CampaignMatrix expand_matrix(const json& m, const std::filesystem::path& base_dir,
                             const EnvLookup& lookup) {
  if (!m.is_object()) {
    throw ConfigError("campaign matrix must be a JSON object");
  }
  static const std::vector<std::string> known = {"base_config", "out",  "drops",
                                                 "seed",        "mu",   "mode",
                                                 "window_policies"};
  for (const auto& [key, _] : m.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown campaign matrix key '" + key + "'");
    }
  }
  json base = json::object();
  if (auto it = m.find("base_config"); it != m.end()) {
    base = it->is_string() ? read_json_file(base_dir / it->get<std::string>()) : *it;
  }

  CampaignMatrix out;
  try {
    out.out = m.value("out", std::string("results"));
    out.drops = m.value("drops", 50);
    const auto mus = m.value("mu", std::vector<int>{0, 1, 2});
    const auto modes = m.value("mode", std::vector<std::string>{"sensing", "no_sensing"});
    json policies = m.value("window_policies", json::array());
    if (policies.empty()) {
      policies.push_back({{"name", "default"}});
    }
    for (const auto& policy : policies) {
      const std::string name = policy.value("name", "default");
      for (const int mu : mus) {
        for (const auto& mode : modes) {
          json doc = base;
          if (policy.contains("t2_policy")) {
            doc["t2_policy"] = policy["t2_policy"];
          }
          if (policy.contains("overrides")) {
            doc.merge_patch(policy["overrides"]);
          }
          if (m.contains("seed")) {
            doc["seed"] = m["seed"];
          }
          doc["mu"] = mu;
          doc["mode"] = mode;
          doc["n_drops"] = out.drops;
          apply_env_overrides(doc, lookup);
          CampaignCell cell;
          cell.policy = name;
          cell.config = config_from_json(doc);
          cell.config.validate();
          cell.mu = cell.config.mu;
          cell.mode = cell.config.mac.mode;
          cell.rel_dir = std::filesystem::path(name) /
                         ("mu-" + std::to_string(cell.mu) + "_" + to_string(cell.mode));
          out.cells.push_back(std::move(cell));
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("campaign matrix: ") + e.what());
  }
  if (out.drops < 1) {
    throw ConfigError("campaign drops must be >= 1");
  }
  return out;
}

CampaignMatrix load_matrix(const std::filesystem::path& path, const EnvLookup& lookup) {
  return expand_matrix(read_json_file(path), path.parent_path(), lookup);
}

RunConfig load_config(const std::filesystem::path& path, const EnvLookup& lookup) {
  json doc = read_json_file(path);
  apply_env_overrides(doc, lookup);
  RunConfig cfg = config_from_json(doc);
  cfg.validate();
  return cfg;
}

}  // namespace nrsl
