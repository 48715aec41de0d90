#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "asymhash/asymhash.hpp"

using namespace asymhash;

namespace {

std::vector<std::int8_t> random_code(std::size_t k, std::mt19937_64& rng) {
  std::vector<std::int8_t> c(k);
  for (auto& x : c) x = (rng() & 1) ? 1 : -1;
  return c;
}

SignMatrix random_codes(std::size_t k, std::size_t n, std::mt19937_64& rng) {
  SignMatrix m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index t = 0; t < m.rows(); ++t) m(t, j) = (rng() & 1) ? 1 : -1;
  }
  return m;
}

void BM_InnerProduct(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const auto u = pack(random_code(k, rng)), v = pack(random_code(k, rng));
  for (auto _ : state) benchmark::DoNotOptimize(inner_product(u, v, k));
}
BENCHMARK(BM_InnerProduct)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_Hamming(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  const auto u = pack(random_code(k, rng)), v = pack(random_code(k, rng));
  for (auto _ : state) benchmark::DoNotOptimize(hamming(u, v, k));
}
BENCHMARK(BM_Hamming)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_ScanTopR(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(3);
  const CodeDatabase db(PackedCodeMatrix::from_signs(random_codes(k, n, rng)));
  const auto q = pack(random_code(k, rng));
  for (auto _ : state) benchmark::DoNotOptimize(scan_top_r(db, q, 10));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_ScanTopR)->Args({10000, 32})->Args({100000, 32})->Args({100000, 128});

void BM_UpdateContext(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t k = 8;
  std::mt19937_64 rng(4);
  const SignMatrix U = random_codes(k, n, rng), V = random_codes(k, n, rng);
  const Dataset d = gen_uniform(n, 10, 4);
  const SimilarityMatrix S = build_similarity(d.X, threshold_for_positive_fraction(d.X, 0.3));
  const LossParams p{0.7, Surrogate::kSqrtLogistic};
  for (auto _ : state) benchmark::DoNotOptimize(build_update_context(U, V, 0.0, 3, S, p));
}
BENCHMARK(BM_UpdateContext)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_RowUpdate(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd M = Eigen::MatrixXd::Random(n, n);
  std::mt19937_64 rng(5);
  const auto v = random_code(static_cast<std::size_t>(n), rng);
  for (auto _ : state) benchmark::DoNotOptimize(update_row_exact(M, v, RowSide::kQuery));
}
BENCHMARK(BM_RowUpdate)->Arg(250)->Arg(500)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
