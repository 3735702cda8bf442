// Scaling benchmarks for the factored paths.  Everything goes through the kernel-function
// route at a fixed landmark count, so cost should grow with N while storage stays N x m.

#include <benchmark/benchmark.h>

#include <vector>

#include "nyk/classifiers.hpp"
#include "nyk/datasets.hpp"
#include "nyk/lowrank.hpp"

namespace {

using namespace nyk;

constexpr Index kLandmarks = 64;

std::vector<Index> spread_landmarks(Index n, Index m) {
  std::vector<Index> lm(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) lm[static_cast<std::size_t>(i)] = i * (n / m);
  return lm;
}

void bm_factorize(benchmark::State& state) {
  const LabeledDataset d = gen_gauss_overlap(static_cast<Index>(state.range(0)), 7);
  const auto lm = spread_landmarks(d.n(), kLandmarks);
  for (auto _ : state) {
    NystromFactors F = nystrom_factorize(d.kernel, d.X, lm);
    benchmark::DoNotOptimize(F.cross.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_factorize)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void bm_evd(benchmark::State& state) {
  const LabeledDataset d = gen_gauss_overlap(static_cast<Index>(state.range(0)), 7);
  const NystromFactors F = nystrom_factorize(d.kernel, d.X, spread_landmarks(d.n(), kLandmarks));
  for (auto _ : state) {
    LowRankEvd E = nystrom_evd(F);
    benchmark::DoNotOptimize(E.eigvecs.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_evd)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void bm_pinv_apply(benchmark::State& state) {
  const LabeledDataset d = gen_gauss_overlap(static_cast<Index>(state.range(0)), 7);
  const NystromFactors F = nystrom_factorize(d.kernel, d.X, spread_landmarks(d.n(), kLandmarks));
  const LowRankPinv P = nystrom_pinv(F);
  const VectorXd v = VectorXd::Ones(d.n());
  for (auto _ : state) {
    VectorXd u = pinv_apply(P, v);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_pinv_apply)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void bm_row_sums(benchmark::State& state) {
  const LabeledDataset d = gen_gauss_overlap(static_cast<Index>(state.range(0)), 7);
  const NystromFactors F = nystrom_factorize(d.kernel, d.X, spread_landmarks(d.n(), kLandmarks));
  for (auto _ : state) {
    VectorXd s = row_sums(F);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_row_sums)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void bm_train_ikfd(benchmark::State& state) {
  const LabeledDataset d = gen_gauss_overlap(static_cast<Index>(state.range(0)), 7);
  const NystromFactors F = nystrom_factorize(d.kernel, d.X, spread_landmarks(d.n(), kLandmarks));
  for (auto _ : state) {
    IkfdModel M = train_ikfd(F, d.labels);
    benchmark::DoNotOptimize(M.alpha.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_train_ikfd)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

void bm_extend(benchmark::State& state) {
  const LabeledDataset d = gen_gauss_overlap(static_cast<Index>(state.range(0)), 7);
  const NystromFactors F = nystrom_factorize(d.kernel, d.X, spread_landmarks(d.n(), kLandmarks));
  VectorXd k_new(F.m());
  for (Index j = 0; j < F.m(); ++j) k_new[j] = F.cross(0, j);
  for (auto _ : state) {
    VectorXd row = nystrom_extend(F, k_new);
    benchmark::DoNotOptimize(row.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_extend)->RangeMultiplier(2)->Range(512, 8192)->Complexity();

}  // namespace

BENCHMARK_MAIN();
