#include <benchmark/benchmark.h>

#include <vector>

#include "ue/datasets/dataset.hpp"
#include "ue/gp/kernel.hpp"
#include "ue/gp/laplace.hpp"
#include "ue/mcdropout/mcdropout.hpp"
#include "ue/nnet/mlp.hpp"
#include "ue/numerics/linalg.hpp"
#include "ue/numerics/rng.hpp"

using namespace ue;

namespace {

DenseMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  RngStream rng(seed);
  DenseMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.uniform();
  return m;
}

}  // namespace

static void BM_Cholesky(benchmark::State& state) {
  const auto n = state.range(0);
  const DenseMatrix a = random_matrix(n, n, 1);
  const DenseMatrix spd = a * a.transpose() + DenseMatrix::Identity(n, n) * static_cast<double>(n);
  for (auto _ : state) benchmark::DoNotOptimize(cholesky(spd));
  state.SetComplexityN(n);
}
BENCHMARK(BM_Cholesky)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNCubed);

static void BM_LaplaceFit(benchmark::State& state) {
  const Dataset d = make_toy2d(static_cast<std::size_t>(state.range(0)), 0);
  const gp::KernelParams kp{2.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(gp::laplace_fit(d, kp));
}
BENCHMARK(BM_LaplaceFit)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_GpPredictBatch(benchmark::State& state) {
  const auto s = gp::laplace_fit(make_toy2d(200, 0), {2.0, 1.0});
  const DenseMatrix probes = random_matrix(2, 10000, 3).array() * 12.0 - 6.0;
  for (auto _ : state) benchmark::DoNotOptimize(gp::predict_batch(s, probes));
}
BENCHMARK(BM_GpPredictBatch)->Unit(benchmark::kMillisecond);

static void BM_MlpForward(benchmark::State& state) {
  const std::vector<std::size_t> arch{784, 500, 2};
  const nnet::MLPParams p = nnet::mlp_init(arch, 0);
  const DenseMatrix x = random_matrix(784, state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(nnet::forward_batch(p, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(64)->Arg(1024);

static void BM_MlpBackward(benchmark::State& state) {
  const std::vector<std::size_t> arch{784, 500, 2};
  const nnet::MLPParams p = nnet::mlp_init(arch, 0);
  const DenseMatrix x = random_matrix(784, 64, 2);
  std::vector<int> y(64);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<int>(i % 2);
  for (auto _ : state) benchmark::DoNotOptimize(nnet::backward(p, x, y, nullptr, 0.005));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_MlpBackward);

static void BM_McAverage(benchmark::State& state) {
  const std::vector<std::size_t> arch{2, 300, 2};
  const nnet::MLPParams p = nnet::mlp_init(arch, 0);
  const DenseMatrix probes = random_matrix(2, 1000, 4);
  const mcdropout::MCDropoutConfig cfg{static_cast<std::size_t>(state.range(0)), 0.5, 0};
  for (auto _ : state) benchmark::DoNotOptimize(mcdropout::mc_average_batch(p, probes, cfg));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_McAverage)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
