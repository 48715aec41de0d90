#pragma once

// Threshold-sweep evaluation: average precision, precision-recall curves,
// and the number of bits needed to reach a given AP.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "asymhash/bitcode.hpp"
#include "asymhash/datagen.hpp"
#include "asymhash/train.hpp"

namespace asymhash {

struct ScoredLabel {
  double score = 0.0;
  std::int8_t label = -1;  // +1 relevant, -1 not
};

// Items ranked by descending score; equal scores keep their input order.
// AP is the mean, over positives, of the precision at that positive's rank.
// Throws std::invalid_argument when there is no positive.
double average_precision(std::span<const ScoredLabel> items);

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;  // predicted positive iff score >= threshold
};

// One point per distinct score, from the highest score down.
std::vector<PrPoint> pr_curve(std::span<const ScoredLabel> items);

enum class Pooling : std::uint8_t {
  kMicro,  // all (query, database) pairs in one ranking
  kMacro,  // mean of per-query AP over queries with a positive
};

struct EvalReport {
  double ap = 0.0;
  // theta here is the code-space threshold: a pair is predicted similar iff
  // <f(x), g(x_i)> > theta. Points run from the strictest theta down.
  std::vector<PrPoint> pr_points;
  std::size_t pairs = 0;
  std::size_t positives = 0;
};

// Scores are <query_j, database_i> over all pairs, via the packed kernel.
EvalReport evaluate_codes(const PackedCodeMatrix& queries, const PackedCodeMatrix& database, const SimilarityMatrix& S,
                          Pooling pooling = Pooling::kMicro);

// Query codes come from the model's query hash applied to X_test, or from its
// stored training codes when it has no hash. Database codes come from the
// stored codewords for LIN:V / UV / SYM and from the database hash applied
// to X_db for LIN:LIN and LSH (stored codes when X_db is null).
EvalReport evaluate_model(const TrainedModel& model, const Eigen::MatrixXd* X_test, const Eigen::MatrixXd* X_db,
                          const SimilarityMatrix& S_cross, Pooling pooling = Pooling::kMicro);

// Held-out evaluation data for a linear model.
struct HoldOut {
  Eigen::MatrixXd X_test;
  SimilarityMatrix S_cross;  // test x train
};

// AP after each bit stage k = 1..config.k_max (entry k-1). Without a
// hold-out set the model's own training codes are scored against S.
std::vector<double> ap_by_bits(Variant variant, const Eigen::MatrixXd* X, const SimilarityMatrix& S,
                               const TrainConfig& config, const HoldOut* holdout = nullptr);

struct BitsRow {
  double target = 0.0;
  std::optional<std::size_t> k;  // nullopt: not reached within k_max
};

// First k whose AP reaches each target. Throws unless every target is in (0,1).
std::vector<BitsRow> first_bits_reaching(std::span<const double> targets, std::span<const double> ap_by_k);

std::vector<BitsRow> bits_for_ap(Variant variant, const Eigen::MatrixXd* X, const SimilarityMatrix& S,
                                 std::span<const double> targets, const TrainConfig& config,
                                 const HoldOut* holdout = nullptr);

}  // namespace asymhash
