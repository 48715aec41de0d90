#include "asymhash/eval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "asymhash/parallel.hpp"

namespace asymhash {
namespace {

std::vector<std::size_t> ranking(std::span<const ScoredLabel> items) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return items[a].score > items[b].score; });
  return order;
}

std::size_t count_positives(std::span<const ScoredLabel> items) {
  std::size_t p = 0;
  for (const auto& it : items) {
    if (it.label != 1 && it.label != -1) throw std::invalid_argument("labels must be +1 or -1");
    p += it.label == 1;
  }
  if (p == 0) throw std::invalid_argument("average precision is undefined without positives");
  return p;
}

}  // namespace

double average_precision(std::span<const ScoredLabel> items) {
  const std::size_t positives = count_positives(items);
  const std::vector<std::size_t> order = ranking(items);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (items[order[r]].label == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(positives);
}

std::vector<PrPoint> pr_curve(std::span<const ScoredLabel> items) {
  const std::size_t positives = count_positives(items);
  const std::vector<std::size_t> order = ranking(items);
  std::vector<PrPoint> out;
  std::size_t tp = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    tp += items[order[r]].label == 1;
    const bool last_of_score = r + 1 == order.size() || items[order[r + 1]].score != items[order[r]].score;
    if (!last_of_score) continue;
    out.push_back({static_cast<double>(tp) / static_cast<double>(r + 1),
                   static_cast<double>(tp) / static_cast<double>(positives), items[order[r]].score});
  }
  return out;
}

EvalReport evaluate_codes(const PackedCodeMatrix& queries, const PackedCodeMatrix& database, const SimilarityMatrix& S,
                          Pooling pooling) {
  if (queries.k() != database.k()) throw std::invalid_argument("query and database code lengths differ");
  if (S.rows() != queries.n() || S.cols() != database.n()) {
    throw std::invalid_argument("ground truth shape does not match query x database");
  }
  const std::size_t nq = queries.n();
  const std::size_t nd = database.n();
  const int k = static_cast<int>(queries.k());
  const std::size_t words = queries.words_per_code();

  std::vector<ScoredLabel> items(nq * nd);
  parallel_for(0, nq, [&](std::size_t i) {
    const Word* q = queries.column(i).data();
    for (std::size_t j = 0; j < nd; ++j) {
      const int ip = k - 2 * popcount_xor(q, database.column(j).data(), words);
      items[i * nd + j] = {static_cast<double>(ip), S(i, j)};
    }
  });

  EvalReport report;
  report.pairs = items.size();
  report.positives = S.positive_count();
  if (pooling == Pooling::kMicro) {
    report.ap = average_precision(items);
  } else {
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < nq; ++i) {
      const std::span<const ScoredLabel> row(items.data() + i * nd, nd);
      if (std::none_of(row.begin(), row.end(), [](const ScoredLabel& s) { return s.label == 1; })) continue;
      sum += average_precision(row);
      ++used;
    }
    if (used == 0) throw std::invalid_argument("average precision is undefined without positives");
    report.ap = sum / static_cast<double>(used);
  }

  // Scores are integers of k's parity, so consecutive distinct scores are at
  // least 2 apart; the code-space theta sits halfway to the next score down.
  report.pr_points = pr_curve(items);
  for (std::size_t p = 0; p < report.pr_points.size(); ++p) {
    const double s = report.pr_points[p].threshold;
    const double next = p + 1 < report.pr_points.size() ? report.pr_points[p + 1].threshold : s - 2.0;
    report.pr_points[p].threshold = 0.5 * (s + next);
  }
  return report;
}

EvalReport evaluate_model(const TrainedModel& model, const Eigen::MatrixXd* X_test, const Eigen::MatrixXd* X_db,
                          const SimilarityMatrix& S_cross, Pooling pooling) {
  PackedCodeMatrix queries;
  if (model.query_hash && X_test != nullptr) {
    queries = model.query_hash->encode(*X_test);
  } else if (X_test == nullptr) {
    queries = model.query_codes;
  } else {
    throw std::invalid_argument("model " + to_string(model.variant) + " has no query map for new points");
  }

  PackedCodeMatrix database;
  const bool hashed_db = model.variant == Variant::kLinLin || model.variant == Variant::kLsh;
  if (hashed_db && X_db != nullptr) {
    if (!model.database_hash) throw std::invalid_argument("model is missing its database hash");
    database = model.database_hash->encode(*X_db);
  } else {
    database = model.database_codes;
    if (X_db != nullptr && static_cast<std::size_t>(X_db->cols()) != database.n()) {
      throw std::invalid_argument("database point count does not match the stored codewords");
    }
  }
  return evaluate_codes(queries, database, S_cross, pooling);
}

std::vector<double> ap_by_bits(Variant variant, const Eigen::MatrixXd* X, const SimilarityMatrix& S,
                               const TrainConfig& config, const HoldOut* holdout) {
  std::vector<double> aps;
  TrainHooks hooks;
  hooks.on_stage = [&](const TrainedModel& m) {
    if (holdout != nullptr) {
      aps.push_back(evaluate_model(m, &holdout->X_test, X, holdout->S_cross).ap);
    } else {
      aps.push_back(evaluate_codes(m.query_codes, m.database_codes, S).ap);
    }
  };
  train(variant, X, S, config, hooks);
  return aps;
}

std::vector<BitsRow> first_bits_reaching(std::span<const double> targets, std::span<const double> ap_by_k) {
  std::vector<BitsRow> rows;
  for (double target : targets) {
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("AP targets must lie in (0, 1)");
    BitsRow row{target, std::nullopt};
    for (std::size_t k = 0; k < ap_by_k.size(); ++k) {
      if (ap_by_k[k] >= target) {
        row.k = k + 1;
        break;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<BitsRow> bits_for_ap(Variant variant, const Eigen::MatrixXd* X, const SimilarityMatrix& S,
                                 std::span<const double> targets, const TrainConfig& config, const HoldOut* holdout) {
  for (double t : targets) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("AP targets must lie in (0, 1)");
  }
  const std::vector<double> aps = ap_by_bits(variant, X, S, config, holdout);
  return first_bits_reaching(targets, aps);
}

}  // namespace asymhash
