#include <random>

#include <benchmark/benchmark.h>

#include "mechband/banded_solver.hpp"
#include "mechband/block_assembly.hpp"
#include "mechband/dense_oracle.hpp"
#include "mechband/random_spec.hpp"

namespace {

mechband::OdeSpec lorenz_shaped(std::size_t time_points) {
  mechband::Dimensions d;
  d.time_points = time_points;
  d.variables = 3;
  d.equations = 3;
  d.order = 1;
  d.init_time_points = 1;
  d.init_order = 1;
  std::mt19937_64 rng(7);
  mechband::RandomSpecLimits limits;
  limits.min_step = 0.05;
  limits.max_step = 0.5;
  return mechband::random_spec(d, rng, limits);
}

void BM_BandedForwardBackward(benchmark::State& state) {
  const auto spec = lorenz_shaped(static_cast<std::size_t>(state.range(0)));
  const auto system = mechband::assemble_blocks(spec);
  const std::vector<double> dl_dy(spec.dims.unknowns(), 1.0);
  for (auto _ : state) {
    auto forward = mechband::solve_forward(system);
    auto grads = mechband::solve_backward(forward.factorization, dl_dy);
    benchmark::DoNotOptimize(grads.d_rhs.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BandedForwardBackward)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_DenseForwardBackward(benchmark::State& state) {
  const auto spec = lorenz_shaped(static_cast<std::size_t>(state.range(0)));
  const auto system = mechband::assemble_dense(spec);
  const std::vector<double> dl_dy(spec.dims.unknowns(), 1.0);
  for (auto _ : state) {
    auto result = mechband::solve_dense_with_gradient(system, dl_dy);
    benchmark::DoNotOptimize(result.d_rhs.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DenseForwardBackward)->RangeMultiplier(2)->Range(8, 64)->Complexity();

void BM_AssembleBlocks(benchmark::State& state) {
  const auto spec = lorenz_shaped(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto system = mechband::assemble_blocks(spec);
    benchmark::DoNotOptimize(system.rhs.data());
  }
}
BENCHMARK(BM_AssembleBlocks)->Arg(50)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
