#include "asymhash/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace asymhash {

void validate(const LossParams& params) {
  if (!(params.beta > 0.0 && params.beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
}

double ell(double z, Surrogate surrogate) noexcept {
  if (surrogate == Surrogate::kZeroOne) return z <= 0.0 ? 1.0 : 0.0;
  // log(1 + e^{-z}) = max(-z, 0) + log1p(e^{-|z|}); the exponent is never
  // positive, so nothing overflows however large |z| gets.
  const double softplus = std::max(-z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return std::sqrt(softplus);
}

double total_loss(const Eigen::MatrixXd& Y, const SimilarityMatrix& S, const LossParams& params) {
  if (static_cast<std::size_t>(Y.rows()) != S.rows() || static_cast<std::size_t>(Y.cols()) != S.cols()) {
    throw std::invalid_argument("total_loss: prediction and similarity shapes differ");
  }
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t i = 0; i < S.rows(); ++i) {
    for (std::size_t j = 0; j < S.cols(); ++j) {
      const double y = Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (S(i, j) > 0) {
        pos += ell(y, params.surrogate);
      } else {
        neg += ell(-y, params.surrogate);
      }
    }
  }
  return params.beta * pos + (1.0 - params.beta) * neg;
}

Eigen::MatrixXd predictions(const SignMatrix& U, const SignMatrix& V, double theta) {
  if (U.rows() != V.rows() || U.cols() != V.cols()) throw std::invalid_argument("U and V shapes differ");
  const auto k = static_cast<Eigen::Index>(U.rows());
  const auto n = static_cast<Eigen::Index>(U.cols());
  Eigen::MatrixXd u(k, n), v(k, n);
  for (Eigen::Index t = 0; t < k; ++t) {
    for (Eigen::Index j = 0; j < n; ++j) {
      u(t, j) = U(static_cast<std::size_t>(t), static_cast<std::size_t>(j));
      v(t, j) = V(static_cast<std::size_t>(t), static_cast<std::size_t>(j));
    }
  }
  Eigen::MatrixXd Y = u.transpose() * v;
  Y.array() -= theta;
  return Y;
}

UpdateContext build_update_context(const SignMatrix& U, const SignMatrix& V, double theta, std::size_t t,
                                   const SimilarityMatrix& S, const LossParams& params) {
  validate(params);
  if (t >= U.rows()) throw std::invalid_argument("row index t out of range");
  if (S.rows() != U.cols() || S.cols() != V.cols()) throw std::invalid_argument("similarity shape does not match codes");

  UpdateContext ctx;
  ctx.Yt = predictions(U, V, theta);
  const auto n = static_cast<Eigen::Index>(U.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      ctx.Yt(i, j) -= U(t, static_cast<std::size_t>(i)) * V(t, static_cast<std::size_t>(j));
    }
  }
  ctx.M.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::int8_t s = S(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      const double y = ctx.Yt(i, j);
      ctx.M(i, j) = 0.5 * pair_weight(s, params.beta) *
                    (ell(s * (y - 1.0), params.surrogate) - ell(s * (y + 1.0), params.surrogate));
    }
  }
  const Eigen::MatrixXd up = ctx.Yt.array() + 1.0;
  const Eigen::MatrixXd down = ctx.Yt.array() - 1.0;
  ctx.C = 0.5 * (total_loss(up, S, params) + total_loss(down, S, params));
  return ctx;
}

// ---------------------------------------------------------- IntegerLossTable

IntegerLossTable::IntegerLossTable(int max_abs, double theta, const LossParams& params) : max_abs_(max_abs) {
  const std::size_t size = static_cast<std::size_t>(2 * max_abs + 3);
  pos_.resize(size);
  neg_.resize(size);
  gain_pos_.assign(size, 0.0);
  gain_neg_.assign(size, 0.0);
  for (int p = -max_abs - 1; p <= max_abs + 1; ++p) {
    const double y = static_cast<double>(p) - theta;
    pos_[index(p)] = params.beta * ell(y, params.surrogate);
    neg_[index(p)] = (1.0 - params.beta) * ell(-y, params.surrogate);
  }
  for (int p = -max_abs; p <= max_abs; ++p) {
    gain_pos_[index(p)] = 0.5 * (pos_[index(p - 1)] - pos_[index(p + 1)]);
    gain_neg_[index(p)] = 0.5 * (neg_[index(p - 1)] - neg_[index(p + 1)]);
  }
}

// ---------------------------------------------------------- ProductHistogram

ProductHistogram::ProductHistogram(int max_abs)
    : max_abs_(max_abs),
      pos_(static_cast<std::size_t>(2 * max_abs + 1), 0),
      neg_(static_cast<std::size_t>(2 * max_abs + 1), 0) {}

double ProductHistogram::loss(double theta, const LossParams& params) const noexcept {
  double pos = 0.0;
  double neg = 0.0;
  for (std::size_t b = 0; b < pos_.size(); ++b) {
    const double y = static_cast<double>(static_cast<int>(b) - max_abs_) - theta;
    if (pos_[b]) pos += static_cast<double>(pos_[b]) * ell(y, params.surrogate);
    if (neg_[b]) neg += static_cast<double>(neg_[b]) * ell(-y, params.surrogate);
  }
  return params.beta * pos + (1.0 - params.beta) * neg;
}

std::vector<int> ProductHistogram::support() const {
  std::vector<int> out;
  for (std::size_t b = 0; b < pos_.size(); ++b) {
    if (pos_[b] || neg_[b]) out.push_back(static_cast<int>(b) - max_abs_);
  }
  return out;
}

}  // namespace asymhash
