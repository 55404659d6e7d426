#include <benchmark/benchmark.h>

#include "goq/eval_bench.hpp"
#include "goq/goq_solver.hpp"
#include "goq/hr_scalar.hpp"
#include "goq/hr_vector.hpp"
#include "goq/jacobi.hpp"

#include <cmath>

using namespace goq;

namespace {

const SourceModel& exp2d() {
  static const SourceModel s = builtin_source("exp-iid", {{"dim", 2}});
  return s;
}

void BM_EncodePlain(benchmark::State& state) {
  const Quantizer q = lloyd_max(exp2d(), static_cast<int>(state.range(0)), {}, 1).quantizer;
  const Mat pts = exp2d().sample(1024, 2);
  for (auto _ : state)
    for (Eigen::Index i = 0; i < pts.cols(); ++i) benchmark::DoNotOptimize(q.encode(pts.col(i)));
  state.SetItemsProcessed(state.iterations() * pts.cols());
}
BENCHMARK(BM_EncodePlain)->Arg(8)->Arg(64);

void BM_EncodeWeighted(benchmark::State& state) {
  SolverConfig cfg;
  cfg.M = static_cast<int>(state.range(0));
  cfg.mc_points = 2000;
  cfg.max_iters = 5;
  const Quantizer q = solve(builtin_goal("quadratic-2d"), exp2d(), cfg).quantizer;
  const Mat pts = exp2d().sample(1024, 2);
  for (auto _ : state)
    for (Eigen::Index i = 0; i < pts.cols(); ++i) benchmark::DoNotOptimize(q.encode(pts.col(i)));
  state.SetItemsProcessed(state.iterations() * pts.cols());
}
BENCHMARK(BM_EncodeWeighted)->Arg(8);

void BM_WeightMatrices(benchmark::State& state) {
  const GoalModel goal = builtin_goal("se-multiband");
  const Mat pts = exp2d().sample(256, 3);
  for (auto _ : state)
    for (Eigen::Index i = 0; i < pts.cols(); ++i) benchmark::DoNotOptimize(weight_matrices(goal, pts.col(i), false));
  state.SetItemsProcessed(state.iterations() * pts.cols());
}
BENCHMARK(BM_WeightMatrices);

void BM_SolveIteration(benchmark::State& state) {
  SolverConfig cfg;
  cfg.M = 8;
  cfg.mc_points = static_cast<std::size_t>(state.range(0));
  cfg.max_iters = 1;
  const GoalModel goal = builtin_goal("quadratic-2d");
  for (auto _ : state) benchmark::DoNotOptimize(solve(goal, exp2d(), cfg));
}
BENCHMARK(BM_SolveIteration)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_MonteCarloOl(benchmark::State& state) {
  const GoalModel goal = builtin_goal("se-multiband");
  const Quantizer q = build_uniform_product(exp2d().support(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_ol(goal, q, exp2d(), 10000, 1));
}
BENCHMARK(BM_MonteCarloOl)->Unit(benchmark::kMillisecond);

void BM_Jacobi(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Mat a = Mat::Random(n, n);
  a = (a + a.transpose()).eval();
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_eigen(a));
}
BENCHMARK(BM_Jacobi)->Arg(2)->Arg(8)->Arg(24);

void BM_Integrate(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate([](double g) { return std::cbrt(g * std::exp(-g)); }, 0.1, 10.0));
}
BENCHMARK(BM_Integrate);

void BM_OptimalDensity(benchmark::State& state) {
  const GoalModel goal = builtin_goal("scalar-log");
  const SourceModel src = builtin_source("trunc-exp");
  for (auto _ : state) benchmark::DoNotOptimize(optimal_density(goal, src, 2));
}
BENCHMARK(BM_OptimalDensity)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
