// Benchmark: OpenMP posterior engine vs the serial dense-solve reference,
// over growing observation counts, plus a full-session throughput figure.
// Also cross-checks the two paths while timing them.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "vtt/gp.hpp"
#include "vtt/gp_reference.hpp"
#include "vtt/performance_model.hpp"
#include "vtt/rng.hpp"
#include "vtt/strategies.hpp"

using namespace vtt;
using Clock = std::chrono::steady_clock;

namespace {

std::vector<gp::Observation> observations_on_bins(Rng& rng, std::size_t count) {
  std::vector<gp::Observation> obs;
  std::vector<bool> used(101, false);
  while (obs.size() < count) {
    const std::size_t bin = rng.index(101);
    if (used[bin]) continue;
    used[bin] = true;
    obs.push_back({static_cast<double>(bin) * 0.01, 1.0 + rng.uniform01() * 9.0});
  }
  return obs;
}

template <typename F>
double time_fits(F&& fit, int iterations) {
  const auto start = Clock::now();
  for (int i = 0; i < iterations; ++i) fit();
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count() /
         iterations;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, max threads %d\n\n", omp_get_max_threads());
#else
  std::printf("built without openmp; engine runs serial\n\n");
#endif

  const auto& grid = ConceptModel::answer_grid();
  std::printf("%6s %14s %14s %9s %12s\n", "n_obs", "engine ms/fit", "serial ms/fit",
              "speedup", "max |diff|");

  Rng rng(1);
  for (std::size_t n : {5, 15, 30, 60, 101}) {
    const auto obs = observations_on_bins(rng, n);
    const int iterations = n <= 30 ? 400 : 150;

    double max_diff = 0.0;
    {
      const auto fast = gp::posterior(obs, grid, {});
      const auto slow = gp::reference::posterior(obs, grid, {});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(fast.mean[i] - slow.mean[i]));
        max_diff = std::max(max_diff, std::abs(fast.variance[i] - slow.variance[i]));
      }
    }

    const double engine_ms =
        time_fits([&] { gp::posterior(obs, grid, {}); }, iterations);
    const double serial_ms =
        time_fits([&] { gp::reference::posterior(obs, grid, {}); }, iterations);
    std::printf("%6zu %14.3f %14.3f %8.2fx %12.2e\n", n, engine_ms, serial_ms,
                serial_ms / engine_ms, max_diff);
  }

  // End-to-end: one uncertainty-driven session over a 200x11 pool.
  SyntheticDatasetSpec dspec;
  dspec.n_samples = 200;
  dspec.n_concepts = 11;
  dspec.prevalence = {0.60, 0.45, 0.35, 0.28, 0.22, 0.17, 0.13, 0.10, 0.08, 0.06, 0.05};
  dspec.seed = 2;
  const auto ds = generate_dataset(dspec);

  SessionConfig config;
  config.strategy = StrategyKind::uncertainty;
  config.max_questions = 500;
  config.seed = 3;
  SyntheticMuE mue(SyntheticMuESpec::uniform(0.7, ds.n_concepts(), 4));

  const auto start = Clock::now();
  const auto log = run_session(config, ds, mue);
  const double session_s = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("\nsession: %zu questions over %d concepts in %.2f s (%.2f ms/question)\n",
              log.records.size(), ds.n_concepts(), session_s,
              1000.0 * session_s / static_cast<double>(log.records.size()));
  return 0;
}
