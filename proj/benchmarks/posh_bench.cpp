#include <benchmark/benchmark.h>

#include <vector>

#include "posh/codes.hpp"
#include "posh/hash_model.hpp"
#include "posh/rng.hpp"
#include "posh/sparse_index.hpp"
#include "posh/trainers.hpp"

namespace {

using namespace posh;

std::vector<double> normal_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

Matrix normal_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  const std::vector<double> v = normal_vector(rows * cols, seed);
  Matrix m(rows, cols);
  std::copy(v.begin(), v.end(), m.data());
  return m;
}

void BM_Wta(benchmark::State& state) {
  const auto D = static_cast<std::size_t>(state.range(0));
  const auto alpha = static_cast<std::size_t>(state.range(1));
  const std::vector<double> y = normal_vector(D, 1);
  for (auto _ : state) benchmark::DoNotOptimize(wta(y, alpha));
}
BENCHMARK(BM_Wta)->Args({1024, 64})->Args({4096, 64})->Args({64, 8});

void BM_SparseHamming(benchmark::State& state) {
  const auto D = static_cast<std::size_t>(state.range(0));
  const auto alpha = static_cast<std::size_t>(state.range(1));
  const SparseCode a = wta(normal_vector(D, 2), alpha);
  const SparseCode b = wta(normal_vector(D, 3), alpha);
  for (auto _ : state) benchmark::DoNotOptimize(sparse_hamming(a, b));
}
BENCHMARK(BM_SparseHamming)->Args({1024, 64})->Args({64, 8});

void BM_DenseHamming(benchmark::State& state) {
  const auto bits = static_cast<std::size_t>(state.range(0));
  const DenseCode a = sign_code(normal_vector(bits, 4));
  const DenseCode b = sign_code(normal_vector(bits, 5));
  for (auto _ : state) benchmark::DoNotOptimize(dense_hamming(a, b));
}
BENCHMARK(BM_DenseHamming)->Arg(64)->Arg(1024);

// One query against n stored codes; alpha = 64 at D = 1024 uses the bitset path.
void BM_KnnQuery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto alpha = static_cast<std::uint32_t>(state.range(1));
  constexpr std::uint32_t kD = 1024;
  SparseIndex index(kD, alpha);
  for (std::size_t i = 0; i < n; ++i) index.add(i, wta(normal_vector(kD, 100 + i), alpha));
  const SparseCode q = wta(normal_vector(kD, 7), alpha);
  for (auto _ : state) benchmark::DoNotOptimize(index.knn_query(q, 100));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_KnnQuery)->Args({10000, 64})->Args({10000, 16})->Unit(benchmark::kMicrosecond);

void BM_HashSparse(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const HashModel model = gaussian_orthogonal_init(d, 1024, 9, 64);
  const std::vector<double> x = normal_vector(d, 10);
  for (auto _ : state) benchmark::DoNotOptimize(hash_sparse(model, x));
}
BENCHMARK(BM_HashSparse)->Arg(64)->Arg(320);

void BM_PoshEpoch(benchmark::State& state) {
  const Matrix x = normal_matrix(2000, 64, 11);
  TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_posh(x, 1024, 64, config));
}
BENCHMARK(BM_PoshEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
