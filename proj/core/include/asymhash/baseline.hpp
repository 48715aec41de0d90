#pragma once

#include <cstddef>
#include <cstdint>

#include "asymhash/train.hpp"

namespace asymhash {

// Random-hyperplane LSH: W has i.i.d. standard normal entries drawn row by
// row, so the first j rows of a k-bit hash are the j-bit hash of the same
// seed. No bias; pass a center to hash x - center instead of x.
LinearHash lsh(std::size_t d, std::size_t k, std::uint64_t seed);
LinearHash lsh(std::size_t d, std::size_t k, std::uint64_t seed, const Eigen::VectorXd& center);

// Query and database maps are the same hash.
TrainedModel lsh_model(const Eigen::MatrixXd& X_train, std::size_t k, std::uint64_t seed, bool center);

}  // namespace asymhash
