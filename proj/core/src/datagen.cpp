#include "asymhash/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "asymhash/parallel.hpp"
#include "asymhash/random.hpp"

namespace asymhash {

Eigen::MatrixXd Dataset::subset(Split which) const {
  std::vector<Eigen::Index> cols;
  for (std::size_t j = 0; j < split.size(); ++j) {
    if (split[j] == which) cols.push_back(static_cast<Eigen::Index>(j));
  }
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = X.col(cols[c]);
  return out;
}

void validate(const Dataset& data) {
  if (data.X.rows() < 1) throw std::invalid_argument("dataset dimension must be >= 1");
  if (data.X.cols() < 2) throw std::invalid_argument("dataset needs at least 2 points");
  if (!data.X.allFinite()) throw std::invalid_argument("dataset contains non-finite entries");
  if (data.split.size() != data.size()) throw std::invalid_argument("dataset split tags do not match point count");
}

// ---------------------------------------------------------- SimilarityMatrix

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, std::int8_t fill)
    : rows_(rows), cols_(cols), s_(rows * cols, fill) {
  if (fill != 1 && fill != -1) throw std::invalid_argument("similarity entries must be +1 or -1");
}

SimilarityMatrix SimilarityMatrix::from_values(std::size_t rows, std::size_t cols, std::vector<std::int8_t> values) {
  if (values.size() != rows * cols) throw std::invalid_argument("similarity value count does not match shape");
  for (std::int8_t v : values) {
    if (v != 1 && v != -1) throw std::invalid_argument("similarity entries must be +1 or -1");
  }
  SimilarityMatrix out;
  out.rows_ = rows;
  out.cols_ = cols;
  out.s_ = std::move(values);
  return out;
}

void SimilarityMatrix::set(std::size_t i, std::size_t j, std::int8_t value) {
  if (value != 1 && value != -1) throw std::invalid_argument("similarity entries must be +1 or -1");
  s_[i * cols_ + j] = value;
}

std::size_t SimilarityMatrix::positive_count() const noexcept {
  return static_cast<std::size_t>(std::count(s_.begin(), s_.end(), std::int8_t{1}));
}

double SimilarityMatrix::positive_fraction() const noexcept {
  std::size_t pos = positive_count();
  std::size_t total = s_.size();
  if (square()) {
    for (std::size_t i = 0; i < rows_; ++i) pos -= (*this)(i, i) == 1 ? 1 : 0;
    total -= rows_;
  }
  return total == 0 ? 0.0 : static_cast<double>(pos) / static_cast<double>(total);
}

bool SimilarityMatrix::symmetric() const noexcept {
  if (!square()) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i + 1; j < cols_; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) return false;
    }
  }
  return true;
}

// ------------------------------------------------------------------ datasets

Dataset gen_uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_uniform: n must be >= 2");
  if (d < 1) throw std::invalid_argument("gen_uniform: d must be >= 1");
  Rng rng = make_rng(seed, "data");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < out.X.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.X.rows(); ++i) out.X(i, j) = unit(rng);
  }
  out.split.assign(n, Split::kTrain);
  return out;
}

void tag_train_prefix(Dataset& data, std::size_t n_train) {
  if (n_train > data.size()) throw std::invalid_argument("train count exceeds dataset size");
  data.split.assign(data.size(), Split::kTest);
  std::fill_n(data.split.begin(), n_train, Split::kTrain);
}

namespace {

std::vector<double> sorted_pair_sq_distances(const Eigen::MatrixXd& X) {
  const std::size_t n = static_cast<std::size_t>(X.cols());
  // Row i holds pairs (i, j > i); offsets make the flat layout fixed.
  std::vector<double> dist(n * (n - 1) / 2);
  parallel_for(0, n, [&](std::size_t i) {
    const std::size_t base = i * (2 * n - i - 1) / 2;
    const auto xi = X.col(static_cast<Eigen::Index>(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[base + (j - i - 1)] = (xi - X.col(static_cast<Eigen::Index>(j))).squaredNorm();
    }
  });
  std::sort(dist.begin(), dist.end());
  return dist;
}

}  // namespace

double threshold_for_avg_neighbors(const Eigen::MatrixXd& X, double target) {
  const std::size_t n = static_cast<std::size_t>(X.cols());
  if (n < 2) throw std::invalid_argument("threshold search needs at least 2 points");
  if (!(target > 0.0) || target > static_cast<double>(n - 1)) {
    throw std::invalid_argument("neighbour target must lie in (0, n-1]");
  }
  const std::vector<double> sq = sorted_pair_sq_distances(X);
  const std::size_t m = sq.size();

  // Cutting after the c smallest distances gives a mean neighbour count of
  // 2c/n. A cut is realizable only at the boundary of a run of equal
  // distances, and a cut at 0 additionally needs a positive radius.
  auto realizable = [&](std::size_t c) {
    if (c == m) return true;
    if (c == 0) return sq[0] > 0.0;
    return sq[c - 1] < sq[c];
  };
  auto run_start = [&](std::size_t c) -> std::size_t {  // largest realizable cut <= c
    if (c >= m) return m;
    const auto it = std::lower_bound(sq.begin(), sq.end(), sq[c]);
    return static_cast<std::size_t>(it - sq.begin());
  };
  auto run_end = [&](std::size_t c) -> std::size_t {  // smallest realizable cut >= c
    if (c == 0) {
      if (realizable(0)) return 0;
      c = 1;
    }
    const auto it = std::upper_bound(sq.begin(), sq.end(), sq[c - 1]);
    return static_cast<std::size_t>(it - sq.begin());
  };

  const double want = target * static_cast<double>(n) / 2.0;
  const std::size_t c0 = std::min<std::size_t>(m, static_cast<std::size_t>(std::floor(want)));
  const std::size_t c1 = std::min<std::size_t>(m, c0 + 1);

  std::size_t best = m;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t cand : {run_start(c0), run_end(c0), run_start(c1), run_end(c1)}) {
    if (!realizable(cand)) continue;
    const double gap = std::abs(2.0 * static_cast<double>(cand) / static_cast<double>(n) - target);
    if (gap < best_gap || (gap == best_gap && cand < best)) {
      best_gap = gap;
      best = cand;
    }
  }
  if (best == m) {
    const double max_d = std::sqrt(sq[m - 1]);
    if (max_d == 0.0) {
      if (target < static_cast<double>(n - 1)) {
        throw std::invalid_argument("all points coincide; only the all-neighbours radius exists");
      }
      return 1.0;  // any positive radius covers coincident points
    }
    return max_d;
  }
  if (best == 0) return std::sqrt(sq[0]) / 2.0;
  return 0.5 * (std::sqrt(sq[best - 1]) + std::sqrt(sq[best]));
}

double threshold_for_positive_fraction(const Eigen::MatrixXd& X, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) throw std::invalid_argument("positive fraction must lie in (0, 1]");
  const double n = static_cast<double>(X.cols());
  return threshold_for_avg_neighbors(X, fraction * (n - 1.0));
}

SimilarityMatrix build_cross_similarity(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& database,
                                        double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("radius must be positive and finite");
  if (queries.rows() != database.rows()) throw std::invalid_argument("query and database dimensions differ");
  const std::size_t rows = static_cast<std::size_t>(queries.cols());
  const std::size_t cols = static_cast<std::size_t>(database.cols());
  const double r2 = radius * radius;
  std::vector<std::int8_t> values(rows * cols);
  parallel_for(0, rows, [&](std::size_t i) {
    const auto xi = queries.col(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < cols; ++j) {
      const double d2 = (xi - database.col(static_cast<Eigen::Index>(j))).squaredNorm();
      values[i * cols + j] = d2 <= r2 ? 1 : -1;
    }
  });
  return SimilarityMatrix::from_values(rows, cols, std::move(values));
}

SimilarityMatrix build_similarity(const Eigen::MatrixXd& X, double radius) {
  return build_cross_similarity(X, X, radius);
}

// -------------------------------------------------------------- theorem 1

Theorem1Instance theorem1_instance(int r) {
  if (r < 1 || r > kTheorem1MaxR) {
    throw std::invalid_argument("theorem1 instance needs 1 <= r <= " + std::to_string(kTheorem1MaxR));
  }
  Theorem1Instance inst;
  inst.r = r;
  inst.n = std::size_t{1} << r;
  const std::size_t n = inst.n;
  const std::size_t half = n / 2;
  const auto in_first = [half](std::size_t i) { return i < half; };

  const double off = 1.0 / (2.0 * static_cast<double>(n));
  inst.G.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double g = 0.5;
      if (i != j) g = in_first(i) == in_first(j) ? -off : off;
      inst.G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
    }
  }

  // G = L L^T, so the rows of L are points with the prescribed inner products.
  Eigen::LLT<Eigen::MatrixXd> llt(inst.G);
  if (llt.info() != Eigen::Success) throw std::runtime_error("theorem1 Gram matrix is not positive definite");
  inst.points = llt.matrixL().transpose();
  inst.S = build_similarity(inst.points, 1.0);

  const auto ri = static_cast<std::size_t>(r);
  inst.B = SignMatrix(ri, n);
  inst.group_sign = SignMatrix(ri, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t b = 0; b < ri; ++b) {
      inst.B(b, j) = (j >> (ri - 1 - b)) & 1U ? 1 : -1;
      inst.group_sign(b, j) = in_first(j) ? 1 : -1;
    }
  }
  SignMatrix u(2 * ri, n);
  SignMatrix v(2 * ri, n);
  for (std::size_t b = 0; b < ri; ++b) {
    for (std::size_t j = 0; j < n; ++j) {
      u(b, j) = v(b, j) = inst.B(b, j);
      u(ri + b, j) = inst.group_sign(b, j);
      v(ri + b, j) = static_cast<std::int8_t>(-inst.group_sign(b, j));
    }
  }
  inst.U = PackedCodeMatrix::from_signs(u);
  inst.V = PackedCodeMatrix::from_signs(v);
  inst.theta = -1.0;

  for (std::size_t i = 0; i < n; ++i) {
    (in_first(i) ? inst.first_group : inst.second_group).push_back(i);
    inst.q.push_back(in_first(i) ? 1 : -1);
  }
  return inst;
}

Realization verify_exact_realization(const PackedCodeMatrix& U, const PackedCodeMatrix& V, double theta,
                                     const SimilarityMatrix& S) {
  if (U.k() != V.k()) throw std::invalid_argument("U and V code lengths differ");
  if (S.rows() != U.n() || S.cols() != V.n()) throw std::invalid_argument("similarity shape does not match codes");
  Realization out;
  out.min_margin = std::numeric_limits<double>::infinity();
  const std::size_t words = U.words_per_code();
  const int k = static_cast<int>(U.k());
  for (std::size_t i = 0; i < U.n(); ++i) {
    const Word* ui = U.column(i).data();
    for (std::size_t j = 0; j < V.n(); ++j) {
      const int ip = k - 2 * popcount_xor(ui, V.column(j).data(), words);
      const double margin = S(i, j) * (static_cast<double>(ip) - theta);
      out.min_margin = std::min(out.min_margin, margin);
      if (!(margin > 0.0)) ++out.violations;
    }
  }
  out.exact = out.violations == 0;
  return out;
}

}  // namespace asymhash
