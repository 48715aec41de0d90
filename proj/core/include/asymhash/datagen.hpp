#pragma once

// Synthetic datasets, distance-threshold similarity, and the adversarial
// instance on which asymmetric codes are exponentially shorter than
// symmetric ones.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "asymhash/bitcode.hpp"

namespace asymhash {

enum class Split : std::uint8_t { kTrain, kTest };

// Columns of X are points.
struct Dataset {
  Eigen::MatrixXd X;
  std::vector<Split> split;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(X.rows()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(X.cols()); }

  // Columns tagged `which`, in original order.
  Eigen::MatrixXd subset(Split which) const;
};

// Throws std::invalid_argument unless d >= 1, n >= 2, all entries finite and
// split has one tag per column.
void validate(const Dataset& data);

// Row i is a query / left object, column j a database / right object.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::int8_t fill = -1);
  static SimilarityMatrix from_values(std::size_t rows, std::size_t cols, std::vector<std::int8_t> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  std::int8_t operator()(std::size_t i, std::size_t j) const noexcept { return s_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, std::int8_t value);

  std::span<const std::int8_t> values() const noexcept { return s_; }
  std::span<const std::int8_t> row(std::size_t i) const noexcept { return {s_.data() + i * cols_, cols_}; }

  std::size_t positive_count() const noexcept;
  // Fraction of +1 entries, excluding the diagonal when square.
  double positive_fraction() const noexcept;
  bool symmetric() const noexcept;

  bool operator==(const SimilarityMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int8_t> s_;
};

// n i.i.d. points uniform in [0,1]^d, every column tagged kTrain.
Dataset gen_uniform(std::size_t n, std::size_t d, std::uint64_t seed);

// Tags the first n_train columns kTrain and the rest kTest.
void tag_train_prefix(Dataset& data, std::size_t n_train);

// Euclidean radius at which the mean number of neighbours j != i with
// ||x_i - x_j|| <= radius is as close to `target` as the distance multiset
// allows. The radius sits midway between consecutive distinct distances.
double threshold_for_avg_neighbors(const Eigen::MatrixXd& X, double target);

// Same search, phrased as the fraction of positive off-diagonal pairs.
double threshold_for_positive_fraction(const Eigen::MatrixXd& X, double fraction);

// S_ij = +1 iff ||x_i - x_j|| <= radius.
SimilarityMatrix build_similarity(const Eigen::MatrixXd& X, double radius);
// Rectangular variant: rows index `queries`, columns index `database`.
SimilarityMatrix build_cross_similarity(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& database,
                                        double radius);

struct Theorem1Instance {
  int r = 0;
  std::size_t n = 0;
  Eigen::MatrixXd G;       // Gram matrix of the points
  Eigen::MatrixXd points;  // columns x_i with <x_i, x_j> = G_ij
  SimilarityMatrix S;      // unit-distance rule
  SignMatrix B;            // r x n, columns are the vertices of {-1,+1}^r
  SignMatrix group_sign;   // r x n, +1 on the first half, -1 on the second
  PackedCodeMatrix U;      // [B; group_sign]
  PackedCodeMatrix V;      // [B; -group_sign]
  double theta = -1.0;
  std::vector<std::size_t> first_group;
  std::vector<std::size_t> second_group;
  std::vector<std::int8_t> q;  // +1 on the first half, -1 on the second
};

inline constexpr int kTheorem1MaxR = 12;

// n = 2^r points whose unit-distance similarity is realized exactly by a
// 2r-bit asymmetric code, while any symmetric code needs >= n/2 bits.
// Throws std::invalid_argument unless 1 <= r <= kTheorem1MaxR.
Theorem1Instance theorem1_instance(int r);

struct Realization {
  bool exact = false;
  double min_margin = 0.0;
  std::size_t violations = 0;
};

// Margins S_ij * (<u_i, v_j> - theta) over all pairs, diagonal included.
Realization verify_exact_realization(const PackedCodeMatrix& U, const PackedCodeMatrix& V, double theta,
                                     const SimilarityMatrix& S);

}  // namespace asymhash
