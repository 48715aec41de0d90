#include "asymhash/retrieval.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace asymhash {

CodeDatabase::CodeDatabase(PackedCodeMatrix codes, std::vector<std::string> ids)
    : codes_(std::move(codes)), ids_(std::move(ids)) {
  if (ids_.empty()) {
    ids_.reserve(codes_.n());
    for (std::size_t j = 0; j < codes_.n(); ++j) ids_.push_back(std::to_string(j));
  }
  if (ids_.size() != codes_.n()) throw std::invalid_argument("id count does not match the number of codes");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw std::invalid_argument("duplicate database id '" + id + "'");
  }
}

namespace {

struct Candidate {
  int distance;
  std::size_t column;
};

void check_query(const CodeDatabase& db, std::span<const Word> query) {
  if (db.size() == 0) return;
  if (query.size() != db.codes().words_per_code()) {
    throw std::invalid_argument("query code length does not match the database");
  }
}

}  // namespace

std::vector<Hit> scan_top_r(const CodeDatabase& db, std::span<const Word> query, std::size_t R) {
  if (R == 0) throw std::invalid_argument("R must be >= 1");
  check_query(db, query);
  const auto& ids = db.ids();
  auto worse = [&](const Candidate& a, const Candidate& b) {
    return a.distance != b.distance ? a.distance < b.distance : ids[a.column] < ids[b.column];
  };
  // Max-heap on (distance, id): the top is the current worst kept item.
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)> heap(worse);
  const std::size_t words = query.size();
  for (std::size_t j = 0; j < db.size(); ++j) {
    const Candidate c{popcount_xor(query.data(), db.codes().column(j).data(), words), j};
    if (heap.size() < R) {
      heap.push(c);
    } else if (worse(c, heap.top())) {
      heap.pop();
      heap.push(c);
    }
  }
  std::vector<Hit> out(heap.size());
  for (std::size_t r = out.size(); r-- > 0;) {
    out[r] = {ids[heap.top().column], heap.top().distance};
    heap.pop();
  }
  return out;
}

std::vector<Hit> scan_within(const CodeDatabase& db, std::span<const Word> query, int radius) {
  check_query(db, query);
  std::vector<Hit> out;
  for (std::size_t j = 0; j < db.size(); ++j) {
    const int d = popcount_xor(query.data(), db.codes().column(j).data(), query.size());
    if (d <= radius) out.push_back({db.ids()[j], d});
  }
  std::sort(out.begin(), out.end(),
            [](const Hit& a, const Hit& b) { return a.distance != b.distance ? a.distance < b.distance : a.id < b.id; });
  return out;
}

}  // namespace asymhash
