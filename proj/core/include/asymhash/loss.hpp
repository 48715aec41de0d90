#pragma once

// Weighted pair loss over a prediction matrix Y = U^T V - theta, and the
// per-row decomposition  L = C - u M v^T  that makes a single code row
// exactly optimizable.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "asymhash/bitcode.hpp"
#include "asymhash/datagen.hpp"

namespace asymhash {

enum class Surrogate : std::uint8_t { kZeroOne, kSqrtLogistic };

struct LossParams {
  double beta = 0.7;  // weight on positive pairs; negatives get 1 - beta
  Surrogate surrogate = Surrogate::kSqrtLogistic;
};

void validate(const LossParams& params);

// zero-one: 1 if z <= 0 else 0.
// sqrt-logistic: sqrt(log(1 + exp(-z))), evaluated without overflow.
double ell(double z, Surrogate surrogate) noexcept;

inline double pair_weight(std::int8_t s, double beta) noexcept { return s > 0 ? beta : 1.0 - beta; }

// beta * sum_{S=+1} ell(Y) + (1-beta) * sum_{S=-1} ell(-Y), diagonal included.
double total_loss(const Eigen::MatrixXd& Y, const SimilarityMatrix& S, const LossParams& params);

// U^T V - theta, U and V of equal shape k x n.
Eigen::MatrixXd predictions(const SignMatrix& U, const SignMatrix& V, double theta);

struct UpdateContext {
  Eigen::MatrixXd Yt;  // predictions with row t's outer product removed
  Eigen::MatrixXd M;   // gain matrix; independent of rows u^(t), v^(t)
  double C = 0.0;
};

UpdateContext build_update_context(const SignMatrix& U, const SignMatrix& V, double theta, std::size_t t,
                                   const SimilarityMatrix& S, const LossParams& params);

// When every code entry is +/-1 the products <u_i, v_j> are integers in
// [-k, k], so each pair's weighted loss is one of a handful of values. The
// trainers work on integer products through this table instead of
// re-evaluating the surrogate n^2 times per row update.
class IntegerLossTable {
 public:
  IntegerLossTable(int max_abs, double theta, const LossParams& params);

  int max_abs() const noexcept { return max_abs_; }

  // beta_s * ell(s * (p - theta)) for |p| <= max_abs + 1.
  double loss(std::int8_t s, int p) const noexcept { return (s > 0 ? pos_ : neg_)[index(p)]; }
  // M entry for a residual product pt: 0.5 * (loss(s, pt - 1) - loss(s, pt + 1)).
  double gain(std::int8_t s, int pt) const noexcept { return (s > 0 ? gain_pos_ : gain_neg_)[index(pt)]; }

 private:
  std::size_t index(int p) const noexcept { return static_cast<std::size_t>(p + max_abs_ + 1); }

  int max_abs_;
  std::vector<double> pos_, neg_, gain_pos_, gain_neg_;
};

// Counts of (sign, integer product) pairs; the loss of any theta is then a
// sum over at most 2(2k+1) buckets.
class ProductHistogram {
 public:
  explicit ProductHistogram(int max_abs);

  void add(std::int8_t s, int p) noexcept { ++(s > 0 ? pos_ : neg_)[static_cast<std::size_t>(p + max_abs_)]; }
  double loss(double theta, const LossParams& params) const noexcept;
  // Distinct product values present, ascending.
  std::vector<int> support() const;
  int max_abs() const noexcept { return max_abs_; }

 private:
  int max_abs_;
  std::vector<std::uint64_t> pos_, neg_;
};

}  // namespace asymhash
