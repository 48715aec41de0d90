#include "asymhash/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "asymhash/baseline.hpp"
#include "asymhash/parallel.hpp"

namespace asymhash {

// ------------------------------------------------------------------ enums

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kUV: return "uv";
    case Variant::kSym: return "sym";
    case Variant::kLinLin: return "linlin";
    case Variant::kLinV: return "linv";
    case Variant::kLsh: return "lsh";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "uv") return Variant::kUV;
  if (name == "sym") return Variant::kSym;
  if (name == "linlin" || name == "lin:lin") return Variant::kLinLin;
  if (name == "linv" || name == "lin:v") return Variant::kLinV;
  if (name == "lsh") return Variant::kLsh;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

bool is_linear(Variant v) noexcept { return v == Variant::kLinLin || v == Variant::kLinV || v == Variant::kLsh; }

std::string to_string(InitStrategy s) {
  switch (s) {
    case InitStrategy::kRandom: return "random";
    case InitStrategy::kRankOne: return "rank-one";
    case InitStrategy::kBestOfBoth: return "best";
  }
  return "?";
}

InitStrategy parse_init(std::string_view name) {
  if (name == "random") return InitStrategy::kRandom;
  if (name == "rank-one" || name == "rankone") return InitStrategy::kRankOne;
  if (name == "best" || name == "best-of-both") return InitStrategy::kBestOfBoth;
  throw std::invalid_argument("unknown init strategy '" + std::string(name) + "'");
}

void validate(const TrainConfig& config) {
  validate(config.loss());
  if (config.k_max < 1 || config.k_max > kMaxBits) throw std::invalid_argument("k_max must lie in [1, 1024]");
  if (config.sgd_epochs < 1) throw std::invalid_argument("sgd_epochs must be >= 1");
  if (config.sweeps_per_bit < 1) throw std::invalid_argument("sweeps_per_bit must be >= 1");
  if (!(config.sgd_rate > 0.0) || !std::isfinite(config.sgd_rate)) throw std::invalid_argument("sgd_rate must be positive");
}

// -------------------------------------------------------------- LinearHash

std::vector<std::int8_t> LinearHash::apply(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) throw std::invalid_argument("LinearHash: input dimension mismatch");
  const Eigen::VectorXd proj = center.size() ? Eigen::VectorXd(W * (x - center)) : Eigen::VectorXd(W * x);
  std::vector<std::int8_t> out(bits());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = sign_of(proj(static_cast<Eigen::Index>(t)));
  return out;
}

SignMatrix LinearHash::apply(const Eigen::MatrixXd& X) const {
  if (static_cast<std::size_t>(X.rows()) != dim()) throw std::invalid_argument("LinearHash: input dimension mismatch");
  Eigen::MatrixXd proj = W * X;
  if (center.size()) proj.colwise() -= W * center;
  SignMatrix out(bits(), static_cast<std::size_t>(X.cols()));
  for (std::size_t t = 0; t < out.rows(); ++t) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      out(t, j) = sign_of(proj(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)));
    }
  }
  return out;
}

PackedCodeMatrix LinearHash::encode(const Eigen::MatrixXd& X) const { return PackedCodeMatrix::from_signs(apply(X)); }

bool LinearHash::operator==(const LinearHash& other) const {
  return W.rows() == other.W.rows() && W.cols() == other.W.cols() && W == other.W &&
         center.size() == other.center.size() && center == other.center;
}

// ------------------------------------------------------------- linear algebra

namespace {

struct SingularPair {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
  double value = 0.0;
};

// Flip both vectors so the largest-magnitude entry of `left` is positive.
void canonicalize(SingularPair& p) {
  Eigen::Index idx = 0;
  p.left.cwiseAbs().maxCoeff(&idx);
  if (p.left(idx) < 0) {
    p.left = -p.left;
    p.right = -p.right;
  }
}

SingularPair top_singular_pair(const Eigen::MatrixXd& A) {
  SingularPair p;
  if (std::min(A.rows(), A.cols()) <= 64) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    p.left = svd.matrixU().col(0);
    p.right = svd.matrixV().col(0);
    p.value = svd.singularValues()(0);
  } else {
    // Power iteration on A^T A from a fixed start.
    Eigen::VectorXd right = A.transpose() * Eigen::VectorXd::Ones(A.rows());
    for (Eigen::Index j = 0; j < right.size(); ++j) right(j) += 1e-3 * std::sin(static_cast<double>(j) + 1.0);
    right.normalize();
    Eigen::VectorXd left;
    for (int it = 0; it < 300; ++it) {
      left = A * right;
      const double ln = left.norm();
      if (ln == 0.0) break;
      left /= ln;
      Eigen::VectorXd next = A.transpose() * left;
      p.value = next.norm();
      if (p.value == 0.0) break;
      next /= p.value;
      const double delta = (next - right).norm();
      right = std::move(next);
      if (delta < 1e-10) break;
    }
    p.left = A * right;
    if (p.left.norm() > 0.0) p.left.normalize();
    p.right = right;
  }
  canonicalize(p);
  return p;
}

// Eigenvector of the largest eigenvalue of a symmetric matrix.
Eigen::VectorXd top_eigenvector(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  SingularPair p;
  p.left = eig.eigenvectors().col(A.rows() - 1);
  p.right = p.left;
  canonicalize(p);
  return p.left;
}

std::vector<std::int8_t> signs(const Eigen::VectorXd& v) {
  std::vector<std::int8_t> out(static_cast<std::size_t>(v.size()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sign_of(v(static_cast<Eigen::Index>(i)));
  return out;
}

// Orthonormal basis of the span of the rows of X, as n-vectors.
Eigen::MatrixXd row_space_basis(const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd Xt = X.transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xt);
  const Eigen::Index rank = qr.rank();
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(Xt.rows(), rank);
  return Q;
}

// w with X^T w closest to `target` in least squares.
Eigen::VectorXd fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& target) {
  const Eigen::MatrixXd Xt = X.transpose();
  return Xt.colPivHouseholderQr().solve(target);
}

double bilinear(std::span<const std::int8_t> u, const Eigen::MatrixXd& M, std::span<const std::int8_t> v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < M.cols(); ++j) row += M(i, j) * v[static_cast<std::size_t>(j)];
    s += u[static_cast<std::size_t>(i)] * row;
  }
  return s;
}

std::vector<std::int8_t> codes_of(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  return signs(X.transpose() * w);
}

}  // namespace

// --------------------------------------------------------------- row updates

std::vector<std::int8_t> update_row_exact(const Eigen::MatrixXd& M, std::span<const std::int8_t> other_row,
                                          RowSide side) {
  if (M.rows() != M.cols() || static_cast<std::size_t>(M.rows()) != other_row.size()) {
    throw std::invalid_argument("update_row_exact: dimension mismatch");
  }
  Eigen::VectorXd other(M.rows());
  for (Eigen::Index j = 0; j < other.size(); ++j) other(j) = other_row[static_cast<std::size_t>(j)];
  const Eigen::VectorXd gains = side == RowSide::kQuery ? Eigen::VectorXd(M * other)
                                                        : Eigen::VectorXd(M.transpose() * other);
  return signs(gains);
}

double update_theta(const ProductHistogram& hist, const LossParams& params, double current, std::size_t grid) {
  const std::vector<int> support = hist.support();
  if (support.empty()) return current;
  const double lo = support.front() - 1.0;
  const double hi = support.back() + 1.0;

  std::vector<double> candidates{current, lo, hi};
  for (std::size_t i = 0; i + 1 < support.size(); ++i) candidates.push_back(0.5 * (support[i] + support[i + 1]));
  if (grid >= 2) {
    for (std::size_t g = 0; g < grid; ++g) {
      candidates.push_back(lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid - 1));
    }
  }

  double best = current;
  double best_loss = hist.loss(current, params);
  for (double c : candidates) {
    const double l = hist.loss(c, params);
    if (l < best_loss) {
      best_loss = l;
      best = c;
    }
  }

  if (params.surrogate == Surrogate::kSqrtLogistic) {
    // The surrogate is smooth in theta and its minimum may lie outside the
    // product range. Walk downhill with doubling steps, then golden-section
    // search the last bracket.
    double h = grid >= 2 ? (hi - lo) / static_cast<double>(grid - 1) : 0.5;
    double x = best;
    double fx_walk = best_loss;
    for (double dir : {-1.0, 1.0}) {
      double step = h;
      for (int it = 0; it < 64; ++it) {
        const double f = hist.loss(x + dir * step, params);
        if (!(f < fx_walk)) break;
        x += dir * step;
        fx_walk = f;
        h = std::max(h, step);
        step *= 2.0;
      }
    }
    double a = x - h;
    double b = x + h;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = hist.loss(x1, params);
    double f2 = hist.loss(x2, params);
    for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = hist.loss(x1, params);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = hist.loss(x2, params);
      }
    }
    const double mid = 0.5 * (a + b);
    const double fmid = hist.loss(mid, params);
    if (fmid < best_loss) {
      best_loss = fmid;
      best = mid;
    }
    if (fx_walk < best_loss) {
      best_loss = fx_walk;
      best = x;
    }
  }
  return best;
}

double update_theta(const SignMatrix& U, const SignMatrix& V, const SimilarityMatrix& S, const LossParams& params,
                    double current, std::size_t grid) {
  validate(params);
  if (U.rows() != V.rows() || S.rows() != U.cols() || S.cols() != V.cols()) {
    throw std::invalid_argument("update_theta: shape mismatch");
  }
  const int k = static_cast<int>(U.rows());
  ProductHistogram hist(k);
  for (std::size_t i = 0; i < S.rows(); ++i) {
    for (std::size_t j = 0; j < S.cols(); ++j) {
      int p = 0;
      for (std::size_t t = 0; t < U.rows(); ++t) p += U(t, i) * V(t, j);
      hist.add(S(i, j), p);
    }
  }
  return update_theta(hist, params, current, grid);
}

LinearRowUpdate update_row_linear(const Eigen::MatrixXd& X, std::span<const double> gains, const Eigen::VectorXd& w,
                                  const TrainConfig& config, Rng& rng) {
  const auto n = static_cast<std::size_t>(X.cols());
  if (gains.size() != n) throw std::invalid_argument("update_row_linear: gain count does not match X columns");
  if (w.size() != X.rows()) throw std::invalid_argument("update_row_linear: weight row has wrong dimension");

  LinearRowUpdate out;
  out.w = w;
  out.codes = codes_of(X, w);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.objective_before += gains[i] * out.codes[i];
    total += std::abs(gains[i]);
  }
  out.objective_after = out.objective_before;
  if (total == 0.0) return out;

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (gains[i] != 0.0) order.push_back(i);
  }
  const double mean_weight = total / static_cast<double>(order.size());

  Eigen::VectorXd cand = w;
  for (std::size_t epoch = 0; epoch < config.sgd_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto col = X.col(static_cast<Eigen::Index>(i));
      const double y = gains[i] >= 0.0 ? 1.0 : -1.0;
      const double weight = std::abs(gains[i]) / mean_weight;
      const double z = y * cand.dot(col);
      // d/dw of weight * log(1 + exp(-z)) is -weight * sigmoid(-z) * y * x.
      const double step = config.sgd_rate * weight / (1.0 + std::exp(z));
      cand += (step * y) * col;
    }
  }

  std::vector<std::int8_t> codes = codes_of(X, cand);
  double after = 0.0;
  for (std::size_t i = 0; i < n; ++i) after += gains[i] * codes[i];
  if (after > out.objective_before + 1e-12 * total) {
    out.w = std::move(cand);
    out.codes = std::move(codes);
    out.objective_after = after;
    out.accepted = true;
  }
  return out;
}

LinearRowUpdate update_row_linear(const Eigen::MatrixXd& X, const Eigen::MatrixXd& M,
                                  std::span<const std::int8_t> other_row, RowSide side, const Eigen::VectorXd& w,
                                  const TrainConfig& config, Rng& rng) {
  if (M.rows() != M.cols() || M.cols() != X.cols() || other_row.size() != static_cast<std::size_t>(M.rows())) {
    throw std::invalid_argument("update_row_linear: dimension mismatch");
  }
  Eigen::VectorXd other(M.rows());
  for (Eigen::Index j = 0; j < other.size(); ++j) other(j) = other_row[static_cast<std::size_t>(j)];
  const Eigen::VectorXd g = side == RowSide::kQuery ? Eigen::VectorXd(M * other) : Eigen::VectorXd(M.transpose() * other);
  return update_row_linear(X, std::span<const double>(g.data(), static_cast<std::size_t>(g.size())), w, config, rng);
}

Eigen::MatrixXd project_onto_row_space(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X) {
  if (M.rows() != X.cols()) throw std::invalid_argument("project_onto_row_space: M rows must equal X columns");
  const Eigen::MatrixXd Q = row_space_basis(X);
  return Q * (Q.transpose() * M);
}

std::optional<RankOneInit> rank_one_init(const Eigen::MatrixXd& M, Variant variant, const Eigen::MatrixXd* X) {
  if (M.rows() != M.cols()) throw std::invalid_argument("rank_one_init: M must be square");
  if (M.cwiseAbs().maxCoeff() == 0.0) return std::nullopt;
  RankOneInit out;
  switch (variant) {
    case Variant::kUV: {
      const SingularPair p = top_singular_pair(M);
      out.u = signs(p.left);
      out.v = signs(p.right);
      break;
    }
    case Variant::kSym: {
      const Eigen::MatrixXd sym = 0.5 * (M + M.transpose());
      out.u = signs(top_eigenvector(sym));
      out.v = out.u;
      break;
    }
    case Variant::kLinV:
    case Variant::kLinLin: {
      if (X == nullptr || X->cols() != M.rows()) throw std::invalid_argument("rank_one_init: linear variants need X");
      const Eigen::MatrixXd Q = row_space_basis(*X);
      if (variant == Variant::kLinV) {
        // Columns projected: top pair of Q^T M, lifted back through Q.
        const SingularPair p = top_singular_pair(Q.transpose() * M);
        if (p.value == 0.0) return std::nullopt;
        out.w_query = fit_linear(*X, Q * p.left);
        out.u = codes_of(*X, out.w_query);
        out.v = signs(p.right);
      } else {
        const SingularPair p = top_singular_pair(Q.transpose() * M * Q);
        if (p.value == 0.0) return std::nullopt;
        out.w_query = fit_linear(*X, Q * p.left);
        out.w_database = fit_linear(*X, Q * p.right);
        out.u = codes_of(*X, out.w_query);
        out.v = codes_of(*X, out.w_database);
      }
      break;
    }
    case Variant::kLsh:
      throw std::invalid_argument("rank_one_init: LSH is not trained");
  }
  return out;
}

// ------------------------------------------------------------------ trainers

namespace {

constexpr double kThetaTol = 1e-12;

// Codes U, V (V aliases U when symmetric) with the integer products
// P = U^T V kept in sync, so that residuals and losses are table lookups.
class CodeState {
 public:
  CodeState(const SimilarityMatrix& S, const LossParams& params, bool symmetric)
      : S_(S), params_(params), symmetric_(symmetric), n_(S.rows()), P_(n_ * n_, 0) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return U_.rows(); }
  const SignMatrix& U() const noexcept { return U_; }
  const SignMatrix& V() const noexcept { return symmetric_ ? U_ : V_; }

  double theta = 0.0;

  void reset(const SignMatrix& U, const SignMatrix& V, double th) {
    if (U.cols() != n_ || (!symmetric_ && (V.cols() != n_ || V.rows() != U.rows()))) {
      throw std::invalid_argument("warm start codes do not match the similarity matrix");
    }
    U_ = SignMatrix();
    V_ = SignMatrix();
    std::fill(P_.begin(), P_.end(), 0);
    for (std::size_t t = 0; t < U.rows(); ++t) append(U.row(t), symmetric_ ? U.row(t) : V.row(t));
    theta = th;
  }

  void append(std::span<const std::int8_t> u, std::span<const std::int8_t> v) {
    U_.append_row(u);
    if (!symmetric_) V_.append_row(v);
    add_outer(u, symmetric_ ? u : v, +1);
  }

  void pop() {
    const std::size_t t = k() - 1;
    add_outer(U_.row(t), V().row(t), -1);
    U_.pop_row();
    if (!symmetric_) V_.pop_row();
  }

  // Returns the number of entries that changed.
  std::size_t set_u_row(std::size_t t, std::span<const std::int8_t> row) {
    std::size_t changed = 0;
    if (symmetric_) {
      std::vector<std::int8_t> old(U_.row(t).begin(), U_.row(t).end());
      for (std::size_t i = 0; i < n_; ++i) changed += old[i] != row[i];
      if (changed == 0) return 0;
      add_outer(old, old, -1);
      U_.set_row(t, row);
      add_outer(row, row, +1);
      return changed;
    }
    const auto v = V_.row(t);
    for (std::size_t i = 0; i < n_; ++i) {
      const int delta = row[i] - U_(t, i);
      if (delta == 0) continue;
      ++changed;
      int* p = &P_[i * n_];
      for (std::size_t j = 0; j < n_; ++j) p[j] += delta * v[j];
      U_(t, i) = row[i];
    }
    return changed;
  }

  std::size_t set_v_row(std::size_t t, std::span<const std::int8_t> row) {
    std::size_t changed = 0;
    const auto u = U_.row(t);
    std::vector<int> delta(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      delta[j] = row[j] - V_(t, j);
      changed += delta[j] != 0;
    }
    if (changed == 0) return 0;
    for (std::size_t i = 0; i < n_; ++i) {
      int* p = &P_[i * n_];
      for (std::size_t j = 0; j < n_; ++j) p[j] += u[i] * delta[j];
    }
    V_.set_row(t, row);
    return changed;
  }

  // a_i = sum_j M_ij v_tj, M built from the residual without row t.
  std::vector<double> u_gains(std::size_t t) const {
    const IntegerLossTable table = make_table();
    const auto u = U_.row(t);
    const auto v = V().row(t);
    std::vector<double> a(n_, 0.0);
    parallel_for(0, n_, [&](std::size_t i) {
      const int* p = &P_[i * n_];
      const auto srow = S_.row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < n_; ++j) acc += table.gain(srow[j], p[j] - u[i] * v[j]) * v[j];
      a[i] = acc;
    });
    return a;
  }

  // b_j = sum_i M_ij u_ti.
  std::vector<double> v_gains(std::size_t t) const {
    const IntegerLossTable table = make_table();
    const auto u = U_.row(t);
    const auto v = V().row(t);
    std::vector<double> b(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const int* p = &P_[i * n_];
      const auto srow = S_.row(i);
      const double ui = u[i];
      for (std::size_t j = 0; j < n_; ++j) b[j] += table.gain(srow[j], p[j] - u[i] * v[j]) * ui;
    }
    return b;
  }

  // Dense M for row t, or for a new row appended after the current ones.
  Eigen::MatrixXd gain_matrix(std::optional<std::size_t> t) const {
    const IntegerLossTable table = make_table();
    Eigen::MatrixXd M(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i) {
      const int* p = &P_[i * n_];
      const auto srow = S_.row(i);
      for (std::size_t j = 0; j < n_; ++j) {
        const int pt = t ? p[j] - U_(*t, i) * V()(*t, j) : p[j];
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = table.gain(srow[j], pt);
      }
    }
    return M;
  }

  ProductHistogram histogram() const {
    ProductHistogram h(static_cast<int>(k()));
    for (std::size_t i = 0; i < n_; ++i) {
      const auto srow = S_.row(i);
      for (std::size_t j = 0; j < n_; ++j) h.add(srow[j], P_[i * n_ + j]);
    }
    return h;
  }

  double loss() const { return histogram().loss(theta, params_); }

  // Returns |change in theta|.
  double refit_theta(std::size_t grid) {
    const double next = update_theta(histogram(), params_, theta, grid);
    const double moved = std::abs(next - theta);
    theta = next;
    return moved;
  }

  const LossParams& params() const noexcept { return params_; }

 private:
  IntegerLossTable make_table() const { return IntegerLossTable(static_cast<int>(std::max<std::size_t>(k(), 1)), theta, params_); }

  void add_outer(std::span<const std::int8_t> u, std::span<const std::int8_t> v, int sign) {
    for (std::size_t i = 0; i < n_; ++i) {
      const int ui = sign * u[i];
      int* p = &P_[i * n_];
      for (std::size_t j = 0; j < n_; ++j) p[j] += ui * v[j];
    }
  }

  const SimilarityMatrix& S_;
  LossParams params_;
  bool symmetric_;
  std::size_t n_;
  SignMatrix U_;
  SignMatrix V_;
  std::vector<int> P_;
};

void check_square(const SimilarityMatrix& S) {
  if (!S.square() || S.rows() < 1) throw std::invalid_argument("training needs a square similarity matrix");
}

std::vector<std::int8_t> random_signs(std::size_t n, Rng& rng) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::int8_t> out(n);
  for (auto& s : out) s = coin(rng) ? 1 : -1;
  return out;
}

Eigen::VectorXd random_row(std::size_t d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  Eigen::VectorXd w(static_cast<Eigen::Index>(d));
  for (Eigen::Index c = 0; c < w.size(); ++c) w(c) = normal(rng);
  return w;
}

// Local maximum of u^T M u over single-bit flips, starting from `u`.
std::size_t symmetric_ascent(const Eigen::MatrixXd& M, std::vector<std::int8_t>& u) {
  const auto n = static_cast<std::size_t>(M.rows());
  Eigen::MatrixXd A = M + M.transpose();
  A.diagonal().setZero();
  Eigen::VectorXd uv(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) uv(static_cast<Eigen::Index>(i)) = u[i];
  Eigen::VectorXd g = A * uv;
  const double tol = 1e-12 * (A.cwiseAbs().maxCoeff() + 1.0);
  std::size_t flips = 0;
  for (std::size_t pass = 0; pass < 100; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      // Flipping u_i changes u^T M u by -2 u_i g_i.
      if (-2.0 * u[i] * g(ii) > tol) {
        u[i] = static_cast<std::int8_t>(-u[i]);
        g += (2.0 * u[i]) * A.col(ii);
        ++flips;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return flips;
}


// Alternates u = sign(M v), v = sign(M^T u) until neither side changes.
void alternate(const Eigen::MatrixXd& M, std::vector<std::int8_t>& u, std::vector<std::int8_t>& v) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::VectorXd x(n);
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (Eigen::Index j = 0; j < n; ++j) x(j) = v[static_cast<std::size_t>(j)];
    const Eigen::VectorXd a = M * x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::int8_t s = sign_of(a(i));
      changed |= s != u[static_cast<std::size_t>(i)];
      u[static_cast<std::size_t>(i)] = s;
    }
    for (Eigen::Index i = 0; i < n; ++i) x(i) = u[static_cast<std::size_t>(i)];
    const Eigen::VectorXd b = M.transpose() * x;
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::int8_t s = sign_of(b(j));
      changed |= s != v[static_cast<std::size_t>(j)];
      v[static_cast<std::size_t>(j)] = s;
    }
    if (!changed) break;
  }
}

TrainedModel snapshot(Variant variant, const CodeState& st, const TrainConfig& config,
                      const std::vector<TraceEntry>& trace) {
  TrainedModel m;
  m.variant = variant;
  m.k = st.k();
  m.theta = st.theta;
  m.beta = config.beta;
  m.query_codes = PackedCodeMatrix::from_signs(st.U());
  m.database_codes = PackedCodeMatrix::from_signs(st.V());
  m.loss_trace = trace;
  return m;
}

// Bit-growth driver shared by the two code-only trainers. `init_bit`
// appends the new row pair to the state; `sweep` runs one pass over all
// rows and returns the number of code entries it changed.
template <typename InitBit, typename Sweep>
TrainedModel grow_codes(Variant variant, CodeState& st, const TrainConfig& config, const TrainHooks& hooks,
                        InitBit&& init_bit, Sweep&& sweep) {
  std::vector<TraceEntry> trace;
  std::size_t k_start = 0;
  auto run_sweeps = [&](std::size_t k) {
    for (std::size_t s = 1; s <= config.sweeps_per_bit; ++s) {
      const std::size_t changed = sweep();
      const double moved = config.update_theta ? st.refit_theta(config.theta_grid) : 0.0;
      trace.push_back({k, s, st.loss()});
      if (changed == 0 && moved < kThetaTol) break;
    }
  };

  if (hooks.warm_start) {
    st.reset(hooks.warm_start->U, hooks.warm_start->V, hooks.warm_start->theta);
    k_start = st.k();
    trace.push_back({k_start, 0, st.loss()});
    run_sweeps(k_start);
    if (hooks.on_stage) hooks.on_stage(snapshot(variant, st, config, trace));
  } else {
    st.refit_theta(config.theta_grid);
  }

  double prev = st.loss();
  for (std::size_t k = k_start + 1; k <= config.k_max; ++k) {
    const double theta_before = st.theta;
    init_bit();
    if (config.update_theta) st.refit_theta(config.theta_grid);
    double l = st.loss();
    if (l > prev) {
      // An all-ones bit on both sides shifts every product by one; moving
      // theta along reproduces the (k-1)-bit predictions exactly.
      st.pop();
      const std::vector<std::int8_t> ones(st.n(), 1);
      st.append(ones, ones);
      st.theta = theta_before + 1.0;
      l = st.loss();
    }
    trace.push_back({k, 0, l});
    run_sweeps(k);
    prev = trace.back().loss;
    if (hooks.on_stage) hooks.on_stage(snapshot(variant, st, config, trace));
  }
  return snapshot(variant, st, config, trace);
}

}  // namespace

TrainedModel train_unconstrained(const SimilarityMatrix& S, const TrainConfig& config, const TrainHooks& hooks) {
  validate(config);
  check_square(S);
  CodeState st(S, config.loss(), false);
  Rng init_rng = make_rng(config.seed, "init");

  auto init_bit = [&] {
    const Eigen::MatrixXd M = st.gain_matrix(std::nullopt);
    std::vector<std::int8_t> u, v;
    double best = -std::numeric_limits<double>::infinity();
    auto consider = [&](std::vector<std::int8_t> cu, std::vector<std::int8_t> cv) {
      alternate(M, cu, cv);
      if (const double g = bilinear(cu, M, cv); u.empty() || g > best) {
        best = g;
        u = std::move(cu);
        v = std::move(cv);
      }
    };
    if (config.init != InitStrategy::kRandom) {
      if (auto r1 = rank_one_init(M, Variant::kUV)) consider(std::move(r1->u), std::move(r1->v));
      if (auto r1 = rank_one_init(M, Variant::kSym)) {
        symmetric_ascent(M, r1->u);
        consider(r1->u, r1->u);
      }
    }
    if (config.init != InitStrategy::kRankOne || u.empty()) {
      auto ru = random_signs(st.n(), init_rng);
      auto rv = random_signs(st.n(), init_rng);
      consider(std::move(ru), std::move(rv));
    }
    st.append(u, v);
  };

  auto sweep = [&] {
    std::size_t changed = 0;
    for (std::size_t t = 0; t < st.k(); ++t) {
      const std::vector<double> a = st.u_gains(t);
      std::vector<std::int8_t> row(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) row[i] = sign_of(a[i]);
      changed += st.set_u_row(t, row);
      const std::vector<double> b = st.v_gains(t);
      std::vector<std::int8_t> col(b.size());
      for (std::size_t j = 0; j < b.size(); ++j) col[j] = sign_of(b[j]);
      changed += st.set_v_row(t, col);
    }
    return changed;
  };

  return grow_codes(Variant::kUV, st, config, hooks, init_bit, sweep);
}

TrainedModel train_symmetric(const SimilarityMatrix& S, const TrainConfig& config, const TrainHooks& hooks) {
  validate(config);
  check_square(S);
  CodeState st(S, config.loss(), true);
  Rng init_rng = make_rng(config.seed, "init");

  auto init_bit = [&] {
    const Eigen::MatrixXd M = st.gain_matrix(std::nullopt);
    std::vector<std::int8_t> u;
    double best = -std::numeric_limits<double>::infinity();
    if (config.init != InitStrategy::kRandom) {
      if (auto r1 = rank_one_init(M, Variant::kSym)) {
        best = bilinear(r1->u, M, r1->u);
        u = std::move(r1->u);
      }
    }
    if (config.init != InitStrategy::kRankOne || u.empty()) {
      auto ru = random_signs(st.n(), init_rng);
      if (const double g = bilinear(ru, M, ru); u.empty() || g > best) u = std::move(ru);
    }
    st.append(u, u);
  };

  auto sweep = [&] {
    std::size_t changed = 0;
    for (std::size_t t = 0; t < st.k(); ++t) {
      const Eigen::MatrixXd M = st.gain_matrix(t);
      std::vector<std::int8_t> row(st.U().row(t).begin(), st.U().row(t).end());
      if (symmetric_ascent(M, row) > 0) changed += st.set_u_row(t, row);
    }
    return changed;
  };

  return grow_codes(Variant::kSym, st, config, hooks, init_bit, sweep);
}

namespace {

// Shared body of LIN:LIN and LIN:V.
TrainedModel train_linear(Variant variant, const Eigen::MatrixXd& X_raw, const SimilarityMatrix& S,
                          const TrainConfig& config, const TrainHooks& hooks) {
  validate(config);
  check_square(S);
  if (static_cast<std::size_t>(X_raw.cols()) != S.rows()) {
    throw std::invalid_argument("training data column count does not match the similarity matrix");
  }
  if (X_raw.rows() < 1) throw std::invalid_argument("training data needs d >= 1");
  const bool lin_lin = variant == Variant::kLinLin;
  const auto d = static_cast<std::size_t>(X_raw.rows());

  Eigen::VectorXd center;
  Eigen::MatrixXd X = X_raw;
  if (config.center) {
    center = X_raw.rowwise().mean();
    X.colwise() -= center;
  }

  CodeState st(S, config.loss(), false);
  Rng init_rng = make_rng(config.seed, "init");
  Rng sgd_rng = make_rng(config.seed, "sgd");
  std::vector<Eigen::VectorXd> wq;
  std::vector<Eigen::VectorXd> wd;
  std::vector<TraceEntry> trace;

  auto make_model = [&] {
    TrainedModel m = snapshot(variant, st, config, trace);
    LinearHash q;
    q.W.resize(static_cast<Eigen::Index>(wq.size()), static_cast<Eigen::Index>(d));
    for (std::size_t t = 0; t < wq.size(); ++t) q.W.row(static_cast<Eigen::Index>(t)) = wq[t].transpose();
    q.center = center;
    m.query_hash = std::move(q);
    if (lin_lin) {
      LinearHash g;
      g.W.resize(static_cast<Eigen::Index>(wd.size()), static_cast<Eigen::Index>(d));
      for (std::size_t t = 0; t < wd.size(); ++t) g.W.row(static_cast<Eigen::Index>(t)) = wd[t].transpose();
      g.center = center;
      m.database_hash = std::move(g);
    }
    return m;
  };

  st.refit_theta(config.theta_grid);
  for (std::size_t k = 1; k <= config.k_max; ++k) {
    const Eigen::MatrixXd M = st.gain_matrix(std::nullopt);
    std::optional<RankOneInit> chosen;
    double best = -std::numeric_limits<double>::infinity();
    if (config.init != InitStrategy::kRandom) {
      if (auto r1 = rank_one_init(M, variant, &X)) {
        best = bilinear(r1->u, M, r1->v);
        chosen = std::move(r1);
      }
    }
    if (config.init != InitStrategy::kRankOne || !chosen) {
      RankOneInit rnd;
      rnd.w_query = random_row(d, init_rng);
      rnd.u = codes_of(X, rnd.w_query);
      if (lin_lin) {
        rnd.w_database = random_row(d, init_rng);
        rnd.v = codes_of(X, rnd.w_database);
      } else {
        rnd.v = random_signs(st.n(), init_rng);
      }
      if (const double g = bilinear(rnd.u, M, rnd.v); !chosen || g > best) chosen = std::move(rnd);
    }
    const double prev = st.loss();
    const double theta_before = st.theta;
    wq.push_back(chosen->w_query);
    if (lin_lin) wd.push_back(chosen->w_database);
    st.append(chosen->u, chosen->v);
    if (config.update_theta) st.refit_theta(config.theta_grid);
    if (st.loss() > prev) {
      // A zero weight row hashes everything to +1: the same neutral bit as
      // in the code-only trainers.
      st.pop();
      const std::vector<std::int8_t> ones(st.n(), 1);
      st.append(ones, ones);
      st.theta = theta_before + 1.0;
      wq.back().setZero();
      if (lin_lin) wd.back().setZero();
    }
    trace.push_back({k, 0, st.loss()});

    for (std::size_t s = 1; s <= config.sweeps_per_bit; ++s) {
      std::size_t changed = 0;
      for (std::size_t t = 0; t < st.k(); ++t) {
        const std::vector<double> a = st.u_gains(t);
        LinearRowUpdate up = update_row_linear(X, a, wq[t], config, sgd_rng);
        if (up.accepted) {
          wq[t] = std::move(up.w);
          changed += st.set_u_row(t, up.codes);
        }
      }
      for (std::size_t t = 0; t < st.k(); ++t) {
        const std::vector<double> b = st.v_gains(t);
        if (lin_lin) {
          LinearRowUpdate up = update_row_linear(X, b, wd[t], config, sgd_rng);
          if (up.accepted) {
            wd[t] = std::move(up.w);
            changed += st.set_v_row(t, up.codes);
          }
        } else {
          std::vector<std::int8_t> row(b.size());
          for (std::size_t j = 0; j < b.size(); ++j) row[j] = sign_of(b[j]);
          changed += st.set_v_row(t, row);
        }
      }
      const double moved = config.update_theta ? st.refit_theta(config.theta_grid) : 0.0;
      trace.push_back({k, s, st.loss()});
      if (changed == 0 && moved < kThetaTol) break;
    }
    if (hooks.on_stage) hooks.on_stage(make_model());
  }
  return make_model();
}

}  // namespace

TrainedModel train_lin_lin(const Eigen::MatrixXd& X, const SimilarityMatrix& S, const TrainConfig& config,
                           const TrainHooks& hooks) {
  return train_linear(Variant::kLinLin, X, S, config, hooks);
}

TrainedModel train_lin_v(const Eigen::MatrixXd& X, const SimilarityMatrix& S, const TrainConfig& config,
                         const TrainHooks& hooks) {
  return train_linear(Variant::kLinV, X, S, config, hooks);
}

namespace {

ProductHistogram code_histogram(const PackedCodeMatrix& U, const PackedCodeMatrix& V, const SimilarityMatrix& S) {
  if (U.k() != V.k() || S.rows() != U.n() || S.cols() != V.n()) {
    throw std::invalid_argument("model codes do not match the similarity matrix");
  }
  const int k = static_cast<int>(U.k());
  ProductHistogram hist(k);
  for (std::size_t i = 0; i < U.n(); ++i) {
    for (std::size_t j = 0; j < V.n(); ++j) {
      hist.add(S(i, j), k - 2 * popcount_xor(U.column(i).data(), V.column(j).data(), U.words_per_code()));
    }
  }
  return hist;
}

}  // namespace

TrainedModel train(Variant variant, const Eigen::MatrixXd* X, const SimilarityMatrix& S, const TrainConfig& config,
                   const TrainHooks& hooks) {
  if (is_linear(variant) && X == nullptr) {
    throw std::invalid_argument("variant " + to_string(variant) + " needs feature data");
  }
  switch (variant) {
    case Variant::kUV: return train_unconstrained(S, config, hooks);
    case Variant::kSym: return train_symmetric(S, config, hooks);
    case Variant::kLinLin: return train_lin_lin(*X, S, config, hooks);
    case Variant::kLinV: return train_lin_v(*X, S, config, hooks);
    case Variant::kLsh: {
      validate(config);
      // Untrained; only theta is fitted for each prefix length.
      std::vector<TraceEntry> trace;
      TrainedModel m;
      for (std::size_t k = 1; k <= config.k_max; ++k) {
        if (k < config.k_max && !hooks.on_stage) continue;
        m = lsh_model(*X, k, config.seed, config.center);
        m.beta = config.beta;
        const ProductHistogram hist = code_histogram(m.query_codes, m.database_codes, S);
        if (config.update_theta) m.theta = update_theta(hist, config.loss(), m.theta, config.theta_grid);
        trace.push_back({k, 0, hist.loss(m.theta, config.loss())});
        m.loss_trace = trace;
        if (hooks.on_stage) hooks.on_stage(m);
      }
      return m;
    }
  }
  throw std::invalid_argument("unknown variant");
}

double training_loss(const TrainedModel& model, const SimilarityMatrix& S, const LossParams& params) {
  return code_histogram(model.query_codes, model.database_codes, S).loss(model.theta, params);
}

}  // namespace asymhash
