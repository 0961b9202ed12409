// Serial reference kernels against their OpenMP counterparts on the planar example.
// The thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "swd/dwell.hpp"
#include "swd/lyapunov.hpp"
#include "swd/reference.hpp"
#include "swd/sim.hpp"

namespace {

using namespace swd;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

SwitchedSystem example_system() {
  Mat A(2, 2);
  A << -1.0, -1.0, 1.0, -1.0;
  return SwitchedSystem({make_affine_subsystem(A, vec2(1.0, 1.0), "u1"),
                         make_affine_subsystem(A, vec2(0.0, 1.0), "u2"),
                         make_affine_subsystem(A, vec2(-1.0, 1.0), "u3")});
}

const SwitchedSystem& system() {
  static const SwitchedSystem sys = example_system();
  return sys;
}

std::vector<Vec> grid_starts(std::size_t n) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    out.push_back(vec2(3.0 * std::cos(a), 3.0 * std::sin(a)));
  }
  return out;
}

constexpr double kEps = 0.05;
const MuSampled kMu{200000, 3.3, 42};

void BM_certificate_serial(benchmark::State& state) {
  const auto box = Box::cube(2, -3.0, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::check_certificate(system().at("u1"), box, state.range(0), 42));
  }
}

void BM_certificate_parallel(benchmark::State& state) {
  const auto box = Box::cube(2, -3.0, 3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_certificate(system().at("u1"), box, state.range(0), 42));
  }
}

void BM_mu_sampled_serial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::pair_mu_sampled(kEps, system().at("u1"), system().at("u3"), kMu));
  }
}

void BM_mu_sampled_parallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair_mu_sampled(kEps, system().at("u1"), system().at("u3"), kMu));
  }
}

void BM_batch_serial(benchmark::State& state) {
  const auto signal = signal_from_dwell("u1", {"u2", "u3", "u2"}, {1.43}, 0.0, true);
  const auto starts = grid_starts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::simulate_batch(system(), signal, starts, 5.72, 1e-3));
  }
}

void BM_batch_parallel(benchmark::State& state) {
  const auto signal = signal_from_dwell("u1", {"u2", "u3", "u2"}, {1.43}, 0.0, true);
  const auto starts = grid_starts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_batch(system(), signal, starts, 5.72, 1e-3));
  }
}

void BM_tube_serial(benchmark::State& state) {
  const std::vector<double> grid{0.0, 0.5, 1.0, 1.43};
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::tube_sample(system(), "u1", "u2", kEps, grid,
                                                    state.range(0), 1e-3));
  }
}

void BM_tube_parallel(benchmark::State& state) {
  const std::vector<double> grid{0.0, 0.5, 1.0, 1.43};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tube_sample(system(), "u1", "u2", kEps, grid, state.range(0), 1e-3));
  }
}

}  // namespace

BENCHMARK(BM_certificate_serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_certificate_parallel)->Arg(100000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_mu_sampled_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mu_sampled_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_batch_serial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_parallel)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_tube_serial)->Arg(360)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tube_parallel)->Arg(360)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
