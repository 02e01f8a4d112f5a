#include <benchmark/benchmark.h>

#include <string>

#include "rfamado/cluster.hpp"
#include "rfamado/dissimilarity.hpp"
#include "rfamado/gev_theory.hpp"
#include "rfamado/madogram.hpp"
#include "rfamado/simulate.hpp"

using namespace rfamado;

namespace {

Dataset grid(std::size_t per_cluster, std::size_t years) {
  SimGridSpec spec;
  spec.years = years;
  for (int c = 0; c < 4; ++c) {
    SimCluster cl;
    cl.cluster_id = "c" + std::to_string(c);
    cl.alpha = 0.2;
    for (std::size_t i = 0; i < per_cluster; ++i)
      cl.points.push_back({cl.cluster_id + "_" + std::to_string(i), 10.0 * c, 2.0 * static_cast<double>(i),
                           1.0 + 0.01 * static_cast<double>(i)});
    spec.clusters.push_back(std::move(cl));
  }
  return sample_grid(spec, 42);
}

void BM_RfaEvaluate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = sample_bivariate_logistic({{1.0, 0.1}, {2.0, 0.1}, 0.3}, n, 1);
  const SortedSeries s1(x.y1), s2(x.y2);
  RfaPairEvaluator eval;
  for (auto _ : state) benchmark::DoNotOptimize(eval.evaluate(s1, s2, 1.7));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RfaEvaluate)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_OptimalC(benchmark::State& state) {
  const auto x = sample_bivariate_logistic({{1.0, 0.1}, {2.0, 0.1}, 0.3}, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_c(x.y1, x.y2));
}
BENCHMARK(BM_OptimalC)->Arg(155)->Arg(1000)->Arg(5000);

void BM_DissimilarityMatrix(benchmark::State& state) {
  const auto d = grid(static_cast<std::size_t>(state.range(0)) / 4, 155);
  for (auto _ : state) benchmark::DoNotOptimize(dissimilarity_matrix(d, {}, static_cast<unsigned>(state.range(1))));
}
BENCHMARK(BM_DissimilarityMatrix)->Args({40, 1})->Args({100, 1})->Args({100, 0})->Unit(benchmark::kMillisecond);

void BM_Pam(benchmark::State& state) {
  const auto m = dissimilarity_matrix(grid(static_cast<std::size_t>(state.range(0)) / 4, 100));
  for (auto _ : state) benchmark::DoNotOptimize(pam(m, 4));
}
BENCHMARK(BM_Pam)->Arg(80)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_TheoreticalDGeneral(benchmark::State& state) {
  const BivariateGevSpec s{{1.0, 0.1}, {1.0, 0.3}, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(theoretical_D_general(s, 1.2));
}
BENCHMARK(BM_TheoreticalDGeneral);

}  // namespace
BENCHMARK_MAIN();
