#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "nrsl/kpi.hpp"
#include "nrsl/mode2_mac.hpp"
#include "nrsl/phy.hpp"
#include "nrsl/pool.hpp"
#include "nrsl/scenario.hpp"
#include "nrsl/timeline.hpp"

namespace nrsl {

/// Full description of one simulated cell. Defaults follow the highway
/// platooning setup (3 lanes x 5 UEs, 100 ms / 200 B traffic, 40 MHz at
/// 5.89 GHz, sensing-based selection, window fixed at 16 ms).
struct RunConfig {
  int mu = 0;
  std::uint64_t seed = 1;
  double duration_s = 10.0;
  int n_drops = 50;

  std::string tdd_pattern = "DDDSUUUUUU";
  std::string sl_bitmap = "111111000111";
  // 40 MHz expressed in RBs for mu = 0, 1, 2.
  std::array<int, 3> bandwidth_rbs_per_mu{216, 106, 51};
  int subchannel_size_rbs = 50;
  int pscch_symbols = 1;
  int pssch_symbols = 12;

  MacConfig mac{};
  RadioConfig radio{};
  HighwayLayout layout{};

  int packet_bytes = 200;
  int inter_packet_ms = 100;
  int start_offset_max_ms = 100;

  PirPairing pir_pairing = PirPairing::Lane;
  SimultaneousScope simultaneous_scope = SimultaneousScope::Slot;

  [[nodiscard]] Numerology numerology() const { return Numerology(mu); }
  [[nodiscard]] PoolConfig pool() const;
  [[nodiscard]] SidelinkPattern pattern() const;
  [[nodiscard]] std::int64_t duration_slots() const;
  /// Subchannels one transmission occupies (resolves 0 = whole pool).
  [[nodiscard]] int subchannels_per_tx() const;

  /// Throws ConfigError (or a more specific Error) on any inconsistency.
  void validate() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline constexpr std::string_view kEnvPrefix = "NRSL_";

/// Reads variables from the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Every key a configuration file may carry.
const std::vector<std::string>& config_keys();

/// For each known key K, an environment variable NRSL_<UPPER(K)> replaces
/// the value. The variable is parsed as JSON first and taken as a plain
/// string if that fails.
void apply_env_overrides(nlohmann::json& doc, const EnvLookup& lookup = process_env);

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& cfg);

/// Loads a JSON config file, applies environment overrides and validates.
RunConfig load_config(const std::filesystem::path& path, const EnvLookup& lookup = process_env);

/// One (window policy, mu, mode) cell of a campaign matrix.
struct CampaignCell {
  std::string policy;
  int mu = 0;
  SelectionMode mode = SelectionMode::Sensing;
  RunConfig config;
  /// `<policy>/mu-<m>_<mode>` relative to the campaign output root.
  std::filesystem::path rel_dir;
};

struct CampaignMatrix {
  std::filesystem::path out = "results";
  int drops = 50;
  std::vector<CampaignCell> cells;
};

/// Expands a matrix document:
///   base_config: path (relative to `base_dir`) or inline object
///   out, drops, seed, mu: [..], mode: [..]
///   window_policies: [{name, t2_policy, overrides}]
/// Cells are ordered policy-major, then mu, then mode. Every cell config
/// gets environment overrides applied and is validated.
CampaignMatrix expand_matrix(const nlohmann::json& matrix, const std::filesystem::path& base_dir,
                             const EnvLookup& lookup = process_env);
CampaignMatrix load_matrix(const std::filesystem::path& path, const EnvLookup& lookup = process_env);

std::string to_string(SelectionMode mode);
std::string to_string(T2Mode mode);
std::string to_string(PirPairing pairing);
std::string to_string(SimultaneousScope scope);

}  // namespace nrsl
