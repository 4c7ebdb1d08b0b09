#include <benchmark/benchmark.h>

#include "vfsl/rng.hpp"
#include "vfsl/sim_mapper.hpp"
#include "vfsl/similarity.hpp"
#include "vfsl/vfeb.hpp"

namespace {

using namespace vfsl;

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(rows, cols);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(2.0 * rng.uniform() - 1.0);
  return m;
}

void BM_Fit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto c = static_cast<std::size_t>(state.range(2));
  SimilarityMatrix l;
  l.matrix = random_matrix(n, k, 1);
  LabelVector y;
  y.num_classes = c;
  for (std::size_t j = 0; j < n; ++j) y.labels.push_back(static_cast<std::uint32_t>(j % c));
  for (auto _ : state) benchmark::DoNotOptimize(fit(l, y, {1.0}));
  // Gram + Cholesky + solve.
  state.counters["flops"] = benchmark::Counter(
      static_cast<double>(n) * k * k + static_cast<double>(k) * k * k / 3.0 + 2.0 * k * k * c,
      benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Fit)->Args({256, 128, 10})->Args({1600, 1000, 100})->Args({4000, 1000, 100})
    ->Unit(benchmark::kMillisecond);

void BM_Similarity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  EmbeddingMatrix images{random_matrix(n, 512, 2), std::nullopt, false};
  EmbeddingMatrix prompts{random_matrix(k, 512, 3), std::nullopt, false};
  images = l2_normalize(images);
  prompts = l2_normalize(prompts);
  for (auto _ : state) benchmark::DoNotOptimize(similarity_matrix(images, prompts));
}
BENCHMARK(BM_Similarity)->Args({1000, 1000})->Args({4000, 1000})->Unit(benchmark::kMillisecond);

void BM_VfebEncodeDecode(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  EmbeddingMatrix m{random_matrix(rows, 512, 4), std::nullopt, false};
  for (auto _ : state) benchmark::DoNotOptimize(decode_vfeb(encode_vfeb(m)));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * rows * 512 * 4));
}
BENCHMARK(BM_VfebEncodeDecode)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
