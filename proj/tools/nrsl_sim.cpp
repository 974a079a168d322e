// nrsl-sim: run one simulation cell or a whole campaign matrix.

#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nrsl/config.hpp"
#include "nrsl/engine.hpp"
#include "nrsl/errors.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int default_parallel() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void print_cell(const std::string& name, const json& summary) {
  const auto& pir = summary["pir"];
  std::cout << name << ": pir_median=" << pir["median_ms"].dump()
            << "ms ideal=" << pir["ideal_fraction"].dump()
            << " simtx_median=" << summary["simtx"]["median_pct"].dump() << "%\n";
}

int simulate(const fs::path& config_path, const fs::path& out, std::optional<int> drops,
             std::optional<std::uint64_t> seed, int parallel, bool traces) {
  nrsl::RunConfig cfg = nrsl::load_config(config_path);
  if (drops) {
    cfg.n_drops = *drops;
  }
  if (seed) {
    cfg.seed = *seed;
  }
  cfg.validate();
  const auto result = nrsl::run_campaign(cfg, cfg.n_drops, parallel, traces);
  nrsl::write_cell_outputs(result, cfg, out);
  print_cell(out.string(), nrsl::summarize_campaign(result, cfg));
  return 0;
}

int campaign(const fs::path& matrix_path, std::optional<fs::path> out_override,
             std::optional<int> drops_override, int parallel) {
  nrsl::CampaignMatrix m = nrsl::load_matrix(matrix_path);
  const fs::path out = out_override ? *out_override : m.out;
  const int drops = drops_override ? *drops_override : m.drops;

  json index = json::array();
  for (auto& cell : m.cells) {
    cell.config.n_drops = drops;
    const fs::path dir = out / cell.rel_dir;
    const auto result = nrsl::run_campaign(cell.config, drops, parallel);
    nrsl::write_cell_outputs(result, cell.config, dir);
    const json summary = nrsl::summarize_campaign(result, cell.config);
    print_cell(cell.rel_dir.string(), summary);
    index.push_back({{"policy", cell.policy},
                     {"mu", cell.mu},
                     {"mode", nrsl::to_string(cell.mode)},
                     {"path", cell.rel_dir.string()},
                     {"pir_median_ms", summary["pir"]["median_ms"]},
                     {"pir_ideal_fraction", summary["pir"]["ideal_fraction"]},
                     {"simtx_median_pct", summary["simtx"]["median_pct"]}});
  }
  fs::create_directories(out);
  std::ofstream(out / "index.json") << index.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NR V2X sidelink Mode 2 resource selection simulator"};
  app.require_subcommand(1);

  fs::path config_path;
  fs::path out = "results";
  std::optional<int> drops;
  std::optional<std::uint64_t> seed;
  int parallel = default_parallel();
  bool traces = false;
  auto* sim = app.add_subcommand("simulate", "Run all drops of one configuration");
  sim->add_option("--config", config_path, "JSON configuration file")->required()->check(
      CLI::ExistingFile);
  sim->add_option("--out", out, "Output directory");
  sim->add_option("--drops", drops, "Number of drops (overrides n_drops)");
  sim->add_option("--seed", seed, "Base seed; drop i uses seed + i");
  sim->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_flag("--traces", traces, "Also write per-drop traces");

  fs::path matrix_path;
  std::optional<fs::path> campaign_out;
  std::optional<int> campaign_drops;
  auto* camp = app.add_subcommand("campaign", "Run a matrix of cells");
  camp->add_option("--matrix", matrix_path, "Campaign matrix JSON")->required()->check(
      CLI::ExistingFile);
  camp->add_option("--out", campaign_out, "Output root (overrides the matrix)");
  camp->add_option("--drops", campaign_drops, "Drops per cell (overrides the matrix)");
  camp->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      return simulate(config_path, out, drops, seed, parallel, traces);
    }
    return campaign(matrix_path, campaign_out, campaign_drops, parallel);
  } catch (const nrsl::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
