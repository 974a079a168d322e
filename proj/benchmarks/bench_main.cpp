#include <benchmark/benchmark.h>

#include <vector>

#include "nrsl/config.hpp"
#include "nrsl/engine.hpp"
#include "nrsl/rng.hpp"
#include "nrsl/sensing.hpp"

namespace {

using namespace nrsl;

// Window of `slots` x 4 subchannels with `n_res` random reservations on it.
void BM_BuildExclusion(benchmark::State& state) {
  const auto slots = static_cast<int>(state.range(0));
  const auto n_res = static_cast<std::uint64_t>(state.range(1));
  Rng rng(1);
  std::vector<Resource> window;
  for (int s = 0; s < slots; ++s) {
    for (int c = 0; c < 4; ++c) {
      window.push_back({s, c, 1});
    }
  }
  std::vector<ProjectedReservation> res;
  for (std::uint64_t i = 0; i < n_res; ++i) {
    res.push_back({{static_cast<SlotIndex>(rng.below(static_cast<std::uint64_t>(slots))),
                    static_cast<int>(rng.below(4)), 1},
                   -130.0 + 60.0 * rng.uniform01(),
                   static_cast<UeId>(rng.below(15))});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_exclusion(window, res, 20, -128.0));
  }
}
BENCHMARK(BM_BuildExclusion)->Args({16, 30})->Args({32, 60})->Args({64, 120});

void BM_RunDrop(benchmark::State& state) {
  RunConfig cfg;
  cfg.mu = static_cast<int>(state.range(0));
  cfg.mac.pdb_ms = 20;
  cfg.mac.mode = state.range(1) != 0 ? SelectionMode::Sensing : SelectionMode::NoSensing;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_drop(cfg, seed++));
  }
}
BENCHMARK(BM_RunDrop)
    ->ArgsProduct({{0, 1, 2}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
