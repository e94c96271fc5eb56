// Serial reference kernels against their OpenMP versions.
// Run with --benchmark_filter=<kernel> and vary OMP_NUM_THREADS.

#include <algorithm>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "amvp/kernels.hpp"

using namespace amvp;
using namespace amvp::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

Backend backend_of(const benchmark::State& state) { return state.range(1) ? Backend::openmp : Backend::serial; }

void BM_LpResidual(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto values = random_values(n, 1);
  const std::vector<double> weights(n, 1.0);
  const Backend b = backend_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(lp_residual(values, weights, 0.1, 3.5, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_SampleRejection(benchmark::State& state) {
  RejectionTask task;
  task.dim = 3;
  task.n_proposals = static_cast<std::uint64_t>(state.range(0));
  task.seed = 7;
  task.batch = 4096;
  // unit Heisenberg pseudoball
  task.accept = [](std::span<const double> x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return r2 * r2 + x[2] * x[2] <= 1.0;
  };
  const Backend b = backend_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(sample_rejection(task, b).points.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RelaxSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto in = random_values(n, 2);
  std::vector<std::size_t> nodes;
  for (std::size_t i = 8; i + 8 < n; ++i) nodes.push_back(i);
  RelaxTask task;
  task.nodes = nodes;
  task.damping = 1.0;
  task.update = [&](std::size_t i, std::vector<double>& scratch) {
    scratch.assign(in.begin() + static_cast<std::ptrdiff_t>(i - 8), in.begin() + static_cast<std::ptrdiff_t>(i + 9));
    double lo = scratch[0], hi = scratch[0];
    for (double v : scratch) lo = std::min(lo, v), hi = std::max(hi, v);
    return 0.5 * (lo + hi);
  };
  std::vector<double> out(in);
  const Backend b = backend_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(relax_sweep(task, in, out, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(nodes.size()));
}

}  // namespace

BENCHMARK(BM_LpResidual)->ArgsProduct({{1 << 14, 1 << 20}, {0, 1}})->ArgNames({"n", "omp"});
BENCHMARK(BM_SampleRejection)->ArgsProduct({{1 << 16, 1 << 20}, {0, 1}})->ArgNames({"n", "omp"});
BENCHMARK(BM_RelaxSweep)->ArgsProduct({{1 << 12, 1 << 18}, {0, 1}})->ArgNames({"n", "omp"});

BENCHMARK_MAIN();
