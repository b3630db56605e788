#include <benchmark/benchmark.h>

#include "dopclust/clustering.hpp"
#include "dopclust/data.hpp"
#include "dopclust/dct.hpp"
#include "dopclust/entropy.hpp"
#include "dopclust/features.hpp"
#include "dopclust/manifold.hpp"
#include "dopclust/random.hpp"
#include "dopclust/validity.hpp"

using namespace dopclust;

namespace {

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform();
  return m;
}

void BM_dct2(benchmark::State& state) {
  const auto size = static_cast<Eigen::Index>(state.range(0));
  const Matrix block = uniform_matrix(size, size, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dct2(block));
}
BENCHMARK(BM_dct2)->Arg(10)->Arg(20)->Arg(40)->Arg(80);

void BM_entropy(benchmark::State& state) {
  const Matrix patch = uniform_matrix(40, 40, 2);
  for (auto _ : state) benchmark::DoNotOptimize(entropy(patch, 32));
}
BENCHMARK(BM_entropy);

void BM_local_dct(benchmark::State& state) {
  const Matrix image = uniform_matrix(80, 80, 3);
  for (auto _ : state) benchmark::DoNotOptimize(extract_local_dct(image, {40, 0}));
}
BENCHMARK(BM_local_dct);

void BM_kmeans(benchmark::State& state) {
  const Matrix z = uniform_matrix(state.range(0), 54, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_fit(z, 5, 7).objective);
}
BENCHMARK(BM_kmeans)->Arg(100)->Arg(400);

void BM_kmedoids(benchmark::State& state) {
  const Matrix z = uniform_matrix(state.range(0), 54, 5);
  for (auto _ : state) benchmark::DoNotOptimize(kmedoids_fit(z, 5, 7).objective);
}
BENCHMARK(BM_kmedoids)->Arg(100)->Arg(400);

void BM_silhouette(benchmark::State& state) {
  const Matrix z = uniform_matrix(state.range(0), 54, 6);
  const Labels labels = kmeans_fit(z, 5, 1).labels;
  for (auto _ : state) benchmark::DoNotOptimize(silhouette(z, labels));
}
BENCHMARK(BM_silhouette)->Arg(100)->Arg(400);

void BM_tsne(benchmark::State& state) {
  const Matrix z = uniform_matrix(state.range(0), 54, 7);
  TsneOptions options;
  options.iterations = 250;
  for (auto _ : state) benchmark::DoNotOptimize(tsne(z, options).final_loss);
}
BENCHMARK(BM_tsne)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_mds(benchmark::State& state) {
  const Matrix z = uniform_matrix(state.range(0), 54, 8);
  for (auto _ : state) benchmark::DoNotOptimize(mds(z).final_loss);
}
BENCHMARK(BM_mds)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_lle(benchmark::State& state) {
  const Matrix z = uniform_matrix(state.range(0), 54, 9);
  for (auto _ : state) benchmark::DoNotOptimize(lle(z).final_loss);
}
BENCHMARK(BM_lle)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_synthetic(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_synthetic(SynthConfig{}).size());
}
BENCHMARK(BM_synthetic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
