#pragma once

// Generators and brute-force references shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "asymhash/asymhash.hpp"

namespace testing_support {

using asymhash::SignMatrix;
using asymhash::SimilarityMatrix;

inline std::vector<std::int8_t> random_signs(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::int8_t> out(n);
  for (auto& s : out) s = (rng() & 1U) ? 1 : -1;
  return out;
}

inline SignMatrix random_sign_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  SignMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = (rng() & 1U) ? 1 : -1;
  }
  return m;
}

inline SimilarityMatrix random_similarity(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::vector<std::int8_t> v(rows * cols);
  for (auto& s : v) s = (rng() % 3 == 0) ? 1 : -1;
  return SimilarityMatrix::from_values(rows, cols, std::move(v));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Plain per-entry sum, no shared code with the library.
inline double naive_ell(double z, asymhash::Surrogate s) {
  if (s == asymhash::Surrogate::kZeroOne) return z <= 0.0 ? 1.0 : 0.0;
  return std::sqrt(std::log1p(std::exp(-z)));
}

inline double naive_loss(const SignMatrix& U, const SignMatrix& V, double theta, const SimilarityMatrix& S,
                         double beta, asymhash::Surrogate surrogate) {
  double total = 0.0;
  for (std::size_t i = 0; i < U.cols(); ++i) {
    for (std::size_t j = 0; j < V.cols(); ++j) {
      double y = -theta;
      for (std::size_t t = 0; t < U.rows(); ++t) y += U(t, i) * V(t, j);
      total += S(i, j) > 0 ? beta * naive_ell(y, surrogate) : (1.0 - beta) * naive_ell(-y, surrogate);
    }
  }
  return total;
}

// Every vector in {-1,+1}^n, in binary order.
inline std::vector<std::vector<std::int8_t>> all_sign_vectors(std::size_t n) {
  std::vector<std::vector<std::int8_t>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::int8_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (mask >> i) & 1U ? 1 : -1;
    out.push_back(std::move(v));
  }
  return out;
}

// Precision at each positive's rank, ranks counted without sorting.
inline double oracle_ap(const std::vector<asymhash::ScoredLabel>& items) {
  double sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].label <= 0) continue;
    ++positives;
    std::size_t rank = 0, hits = 0;
    for (std::size_t j = 0; j < items.size(); ++j) {
      const bool ahead = items[j].score > items[i].score || (items[j].score == items[i].score && j <= i);
      if (ahead) {
        ++rank;
        hits += items[j].label > 0;
      }
    }
    sum += static_cast<double>(hits) / static_cast<double>(rank);
  }
  return sum / static_cast<double>(positives);
}

}  // namespace testing_support
