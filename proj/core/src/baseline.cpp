#include "asymhash/baseline.hpp"

#include <stdexcept>

#include "asymhash/random.hpp"

namespace asymhash {

LinearHash lsh(std::size_t d, std::size_t k, std::uint64_t seed) {
  if (d < 1 || k < 1) throw std::invalid_argument("lsh needs d >= 1 and k >= 1");
  Rng rng = make_rng(seed, "lsh");
  std::normal_distribution<double> normal(0.0, 1.0);
  LinearHash h;
  h.W.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index t = 0; t < h.W.rows(); ++t) {
    for (Eigen::Index c = 0; c < h.W.cols(); ++c) h.W(t, c) = normal(rng);
  }
  return h;
}

LinearHash lsh(std::size_t d, std::size_t k, std::uint64_t seed, const Eigen::VectorXd& center) {
  if (static_cast<std::size_t>(center.size()) != d) throw std::invalid_argument("lsh center has wrong dimension");
  LinearHash h = lsh(d, k, seed);
  h.center = center;
  return h;
}

TrainedModel lsh_model(const Eigen::MatrixXd& X_train, std::size_t k, std::uint64_t seed, bool center) {
  const auto d = static_cast<std::size_t>(X_train.rows());
  LinearHash h = center ? lsh(d, k, seed, X_train.rowwise().mean()) : lsh(d, k, seed);
  TrainedModel model;
  model.variant = Variant::kLsh;
  model.k = k;
  model.theta = 0.0;
  model.query_codes = h.encode(X_train);
  model.database_codes = model.query_codes;
  model.query_hash = h;
  model.database_hash = std::move(h);
  return model;
}

}  // namespace asymhash
