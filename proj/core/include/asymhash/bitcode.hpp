#pragma once

// Packed binary codes and the Hamming / inner-product kernels.
//
// A code of length k is a vector in {-1,+1}^k. Codes are stored bit-packed,
// one code per column, ceil(k/64) 64-bit words per column. Bit b of a column
// is 1 iff entry b is +1. Padding bits beyond k are always zero, so the
// kernels can XOR whole words without masking.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace asymhash {

using Word = std::uint64_t;

inline constexpr std::size_t kWordBits = 64;
inline constexpr std::size_t kMaxBits = 1024;

constexpr std::size_t words_for(std::size_t k) noexcept {
  return (k + kWordBits - 1) / kWordBits;
}

// The tie rule used everywhere: sign(0) = +1.
template <typename T>
constexpr std::int8_t sign_of(T value) noexcept {
  return value < T{0} ? std::int8_t{-1} : std::int8_t{1};
}

// Packs a +/-1 vector into ceil(k/64) words. Throws std::invalid_argument on
// an empty code, k > kMaxBits, or an entry outside {-1,+1}.
std::vector<Word> pack(std::span<const std::int8_t> code);

std::vector<std::int8_t> unpack(std::span<const Word> words, std::size_t k);

// <u,v> = k - 2 * hamming(u,v). Both spans must hold exactly words_for(k)
// words; anything else is a k mismatch and throws std::invalid_argument.
int inner_product(std::span<const Word> u, std::span<const Word> v, std::size_t k);
int hamming(std::span<const Word> u, std::span<const Word> v, std::size_t k);

// Unchecked word kernel for hot loops. Caller guarantees equal lengths.
inline int popcount_xor(const Word* u, const Word* v, std::size_t words) noexcept {
  int d = 0;
  for (std::size_t w = 0; w < words; ++w) d += __builtin_popcountll(u[w] ^ v[w]);
  return d;
}

// k x n matrix of +/-1 entries, row-major. This is the working representation
// inside the trainers, which update whole rows u^(t) at a time.
class SignMatrix {
 public:
  SignMatrix() = default;
  SignMatrix(std::size_t rows, std::size_t cols, std::int8_t fill = 1);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::int8_t operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  std::int8_t& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  std::span<const std::int8_t> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<std::int8_t> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }

  void set_row(std::size_t r, std::span<const std::int8_t> values);
  void append_row(std::span<const std::int8_t> values);
  void pop_row();

  std::span<const std::int8_t> data() const noexcept { return data_; }

  bool operator==(const SignMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int8_t> data_;
};

class PackedCodeMatrix {
 public:
  PackedCodeMatrix() = default;
  // All entries -1 (zero bits).
  PackedCodeMatrix(std::size_t k, std::size_t n);

  static PackedCodeMatrix from_signs(const SignMatrix& codes);
  static PackedCodeMatrix from_words(std::size_t k, std::size_t n, std::vector<Word> words);

  std::size_t k() const noexcept { return k_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t words_per_code() const noexcept { return stride_; }

  std::span<const Word> column(std::size_t j) const noexcept {
    return {words_.data() + j * stride_, stride_};
  }
  std::span<const Word> words() const noexcept { return words_; }

  std::int8_t get(std::size_t bit, std::size_t j) const noexcept {
    return (words_[j * stride_ + bit / kWordBits] >> (bit % kWordBits)) & 1U ? 1 : -1;
  }
  void set(std::size_t bit, std::size_t j, std::int8_t value);
  void flip(std::size_t bit, std::size_t j) noexcept {
    words_[j * stride_ + bit / kWordBits] ^= Word{1} << (bit % kWordBits);
  }

  void set_column(std::size_t j, std::span<const std::int8_t> code);
  std::vector<std::int8_t> unpack_column(std::size_t j) const;
  SignMatrix to_signs() const;

  bool operator==(const PackedCodeMatrix&) const = default;

 private:
  std::size_t k_ = 0;
  std::size_t n_ = 0;
  std::size_t stride_ = 0;
  std::vector<Word> words_;
};

}  // namespace asymhash
