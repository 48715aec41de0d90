#include "asymhash/bitcode.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace asymhash {
namespace {

void check_k(std::size_t k) {
  if (k == 0) throw std::invalid_argument("code length k must be positive");
  if (k > kMaxBits) {
    throw std::invalid_argument("code length k=" + std::to_string(k) + " exceeds " +
                                std::to_string(kMaxBits));
  }
}

void check_pair(std::span<const Word> u, std::span<const Word> v, std::size_t k) {
  const std::size_t w = words_for(k);
  if (k == 0 || u.size() != w || v.size() != w) {
    throw std::invalid_argument("packed code length mismatch for k=" + std::to_string(k));
  }
}

void pack_into(std::span<const std::int8_t> code, Word* out) {
  for (std::size_t j = 0; j < code.size(); ++j) {
    const std::int8_t c = code[j];
    if (c == 1) {
      out[j / kWordBits] |= Word{1} << (j % kWordBits);
    } else if (c != -1) {
      throw std::invalid_argument("code entry " + std::to_string(j) + " is not +1 or -1");
    }
  }
}

}  // namespace

std::vector<Word> pack(std::span<const std::int8_t> code) {
  check_k(code.size());
  std::vector<Word> words(words_for(code.size()), 0);
  pack_into(code, words.data());
  return words;
}

std::vector<std::int8_t> unpack(std::span<const Word> words, std::size_t k) {
  if (words.size() != words_for(k)) throw std::invalid_argument("unpack: word count does not match k");
  std::vector<std::int8_t> code(k);
  for (std::size_t j = 0; j < k; ++j) {
    code[j] = (words[j / kWordBits] >> (j % kWordBits)) & 1U ? 1 : -1;
  }
  return code;
}

int hamming(std::span<const Word> u, std::span<const Word> v, std::size_t k) {
  check_pair(u, v, k);
  return popcount_xor(u.data(), v.data(), u.size());
}

int inner_product(std::span<const Word> u, std::span<const Word> v, std::size_t k) {
  return static_cast<int>(k) - 2 * hamming(u, v, k);
}

// ---------------------------------------------------------------- SignMatrix

SignMatrix::SignMatrix(std::size_t rows, std::size_t cols, std::int8_t fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (fill != 1 && fill != -1) throw std::invalid_argument("SignMatrix fill must be +1 or -1");
}

void SignMatrix::set_row(std::size_t r, std::span<const std::int8_t> values) {
  if (r >= rows_ || values.size() != cols_) throw std::invalid_argument("SignMatrix::set_row: shape mismatch");
  std::copy(values.begin(), values.end(), data_.begin() + static_cast<std::ptrdiff_t>(r * cols_));
}

void SignMatrix::append_row(std::span<const std::int8_t> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw std::invalid_argument("SignMatrix::append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

void SignMatrix::pop_row() {
  if (rows_ == 0) throw std::logic_error("SignMatrix::pop_row on empty matrix");
  data_.resize(data_.size() - cols_);
  --rows_;
}

// ---------------------------------------------------------- PackedCodeMatrix

PackedCodeMatrix::PackedCodeMatrix(std::size_t k, std::size_t n)
    : k_(k), n_(n), stride_(words_for(k)), words_(words_for(k) * n, 0) {
  check_k(k);
}

PackedCodeMatrix PackedCodeMatrix::from_signs(const SignMatrix& codes) {
  PackedCodeMatrix out(codes.rows(), codes.cols());
  for (std::size_t t = 0; t < codes.rows(); ++t) {
    for (std::size_t j = 0; j < codes.cols(); ++j) {
      const std::int8_t c = codes(t, j);
      if (c == 1) {
        out.words_[j * out.stride_ + t / kWordBits] |= Word{1} << (t % kWordBits);
      } else if (c != -1) {
        throw std::invalid_argument("SignMatrix entry is not +1 or -1");
      }
    }
  }
  return out;
}

PackedCodeMatrix PackedCodeMatrix::from_words(std::size_t k, std::size_t n, std::vector<Word> words) {
  PackedCodeMatrix out(k, n);
  if (words.size() != out.words_.size()) throw std::invalid_argument("from_words: word count mismatch");
  const std::size_t tail = k % kWordBits;
  if (tail != 0) {
    const Word mask = ~((Word{1} << tail) - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (words[j * out.stride_ + out.stride_ - 1] & mask) {
        throw std::invalid_argument("from_words: nonzero padding bits in column " + std::to_string(j));
      }
    }
  }
  out.words_ = std::move(words);
  return out;
}

void PackedCodeMatrix::set(std::size_t bit, std::size_t j, std::int8_t value) {
  Word& w = words_[j * stride_ + bit / kWordBits];
  const Word mask = Word{1} << (bit % kWordBits);
  if (value == 1) {
    w |= mask;
  } else if (value == -1) {
    w &= ~mask;
  } else {
    throw std::invalid_argument("code entry is not +1 or -1");
  }
}

void PackedCodeMatrix::set_column(std::size_t j, std::span<const std::int8_t> code) {
  if (j >= n_ || code.size() != k_) throw std::invalid_argument("set_column: shape mismatch");
  std::fill_n(words_.begin() + static_cast<std::ptrdiff_t>(j * stride_), stride_, Word{0});
  pack_into(code, words_.data() + j * stride_);
}

std::vector<std::int8_t> PackedCodeMatrix::unpack_column(std::size_t j) const {
  return unpack(column(j), k_);
}

SignMatrix PackedCodeMatrix::to_signs() const {
  SignMatrix out(k_, n_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t t = 0; t < k_; ++t) out(t, j) = get(t, j);
  }
  return out;
}

}  // namespace asymhash
