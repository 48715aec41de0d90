#pragma once

// Linear-scan Hamming retrieval over a packed code database. The scan does
// not care which map produced the stored codes, so asymmetric serving (query
// hashed by W_q, database holding free codewords V) runs the same kernel as
// symmetric serving.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "asymhash/bitcode.hpp"

namespace asymhash {

class CodeDatabase {
 public:
  CodeDatabase() = default;
  // Ids default to "0", "1", ... when empty. Throws on duplicate ids or a
  // count that does not match codes.n().
  CodeDatabase(PackedCodeMatrix codes, std::vector<std::string> ids = {});

  const PackedCodeMatrix& codes() const noexcept { return codes_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return codes_.n(); }
  std::size_t bits() const noexcept { return codes_.k(); }

 private:
  PackedCodeMatrix codes_;
  std::vector<std::string> ids_;
};

struct Hit {
  std::string id;
  int distance = 0;

  bool operator==(const Hit&) const = default;
};

// The min(R, n) smallest Hamming distances, ascending, ties by ascending id.
// Throws std::invalid_argument if R == 0 or the query length is not words_for(k).
std::vector<Hit> scan_top_r(const CodeDatabase& db, std::span<const Word> query, std::size_t R);

// All items with distance <= radius, same order as scan_top_r.
std::vector<Hit> scan_within(const CodeDatabase& db, std::span<const Word> query, int radius);

}  // namespace asymhash
