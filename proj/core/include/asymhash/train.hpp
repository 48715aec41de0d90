#pragma once

// Trainers for symmetric and asymmetric binary codes.
//
// All four trainers minimize the weighted pair loss of Y = U^T V - theta by
// alternating over code rows. For a fixed row t the loss is C - u M v^T
// (see loss.hpp), so an unconstrained row has the closed-form optimum
// sign(M v); rows tied to a linear map sign(W x) are improved by a weighted
// logistic regression that is accepted only when it lowers the loss. Codes
// grow one bit at a time, each bit stage starting from the previous model.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asymhash/bitcode.hpp"
#include "asymhash/datagen.hpp"
#include "asymhash/loss.hpp"
#include "asymhash/random.hpp"

namespace asymhash {

enum class Variant : std::uint8_t {
  kUV,      // arbitrary codes on both sides
  kSym,     // arbitrary codes, V = U
  kLinLin,  // sign(W_q x) against sign(W_d x)
  kLinV,    // sign(W_q x) against free database codewords
  kLsh,     // random hyperplanes, no training
};

std::string to_string(Variant v);
// Accepts "uv", "sym", "linlin", "linv", "lsh". Throws std::invalid_argument.
Variant parse_variant(std::string_view name);
bool is_linear(Variant v) noexcept;

enum class InitStrategy : std::uint8_t { kRandom, kRankOne, kBestOfBoth };

std::string to_string(InitStrategy s);
InitStrategy parse_init(std::string_view name);

struct TrainConfig {
  double beta = 0.7;
  Surrogate surrogate = Surrogate::kSqrtLogistic;
  std::size_t k_max = 16;
  std::size_t sweeps_per_bit = 20;
  std::size_t sgd_epochs = 10;
  double sgd_rate = 0.5;
  std::uint64_t seed = 0;
  InitStrategy init = InitStrategy::kBestOfBoth;
  std::size_t theta_grid = 256;  // uniform candidates on top of the midpoints
  bool update_theta = true;      // re-fit theta after every sweep
  bool center = true;            // linear variants hash x - mean(train)

  LossParams loss() const noexcept { return {beta, surrogate}; }
};

void validate(const TrainConfig& config);

// f(x) = sign(W (x - center)), sign(0) = +1. An empty center means none.
struct LinearHash {
  Eigen::MatrixXd W;  // k x d
  Eigen::VectorXd center;

  std::size_t bits() const noexcept { return static_cast<std::size_t>(W.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(W.cols()); }

  std::vector<std::int8_t> apply(const Eigen::VectorXd& x) const;
  // Codes of every column of X, k x n.
  SignMatrix apply(const Eigen::MatrixXd& X) const;
  PackedCodeMatrix encode(const Eigen::MatrixXd& X) const;

  bool operator==(const LinearHash& other) const;
};

struct TraceEntry {
  std::size_t k = 0;
  std::size_t sweep = 0;  // 0 = right after the new bit is initialized
  double loss = 0.0;
};

struct TrainedModel {
  Variant variant = Variant::kUV;
  std::size_t k = 0;
  double theta = 0.0;
  double beta = 0.7;
  std::optional<LinearHash> query_hash;
  std::optional<LinearHash> database_hash;
  // Codes of the training objects. For LIN:V the database side is the free
  // codeword matrix V; for SYM both sides are the same U.
  PackedCodeMatrix query_codes;
  PackedCodeMatrix database_codes;
  std::vector<TraceEntry> loss_trace;
};

// --------------------------------------------------------------- row updates

enum class RowSide : std::uint8_t {
  kQuery,     // update u^(t) given v^(t): sign(M v)
  kDatabase,  // update v^(t) given u^(t): sign(M^T u)
};

std::vector<std::int8_t> update_row_exact(const Eigen::MatrixXd& M, std::span<const std::int8_t> other_row,
                                          RowSide side = RowSide::kQuery);

// theta minimizing the loss of U^T V - theta over: midpoints between
// consecutive distinct products, the current theta, and `grid` uniform
// points spanning the products, refined locally for continuous surrogates.
// Never returns a theta with higher loss than `current`.
double update_theta(const SignMatrix& U, const SignMatrix& V, const SimilarityMatrix& S, const LossParams& params,
                    double current, std::size_t grid);
double update_theta(const ProductHistogram& hist, const LossParams& params, double current, std::size_t grid);

struct LinearRowUpdate {
  Eigen::VectorXd w;
  std::vector<std::int8_t> codes;  // sign(w^T x_i)
  bool accepted = false;
  double objective_before = 0.0;  // sum_i a_i sign(<w, x_i>), larger is better
  double objective_after = 0.0;
};

// One step on a row tied to a linear map. `gains` are a_i = <M_i, v^(t)>:
// targets sign(a_i), weights |a_i|. Runs config.sgd_epochs epochs of weighted
// logistic SGD from `w`; the result replaces `w` only if it strictly raises
// sum_i a_i sign(<w, x_i>), which is the same as strictly lowering the loss.
LinearRowUpdate update_row_linear(const Eigen::MatrixXd& X, std::span<const double> gains, const Eigen::VectorXd& w,
                                  const TrainConfig& config, Rng& rng);
LinearRowUpdate update_row_linear(const Eigen::MatrixXd& X, const Eigen::MatrixXd& M,
                                  std::span<const std::int8_t> other_row, RowSide side, const Eigen::VectorXd& w,
                                  const TrainConfig& config, Rng& rng);

// Each column of M replaced by its least-squares projection onto the span of
// the rows of X, i.e. the vectors (<w, x_1>, ..., <w, x_n>).
Eigen::MatrixXd project_onto_row_space(const Eigen::MatrixXd& M, const Eigen::MatrixXd& X);

struct RankOneInit {
  std::vector<std::int8_t> u;
  std::vector<std::int8_t> v;
  Eigen::VectorXd w_query;     // linear variants
  Eigen::VectorXd w_database;  // LIN:LIN
};

// Thresholded top singular pair of M (after projecting onto the row space of
// X for the linear variants). nullopt when M is all zeros.
std::optional<RankOneInit> rank_one_init(const Eigen::MatrixXd& M, Variant variant,
                                         const Eigen::MatrixXd* X = nullptr);

// ------------------------------------------------------------------ trainers

using StageCallback = std::function<void(const TrainedModel&)>;

struct WarmStart {
  SignMatrix U;
  SignMatrix V;  // ignored by the symmetric trainer
  double theta = 0.0;
};

struct TrainHooks {
  StageCallback on_stage;  // called with the model at the end of every bit stage
  std::optional<WarmStart> warm_start;
};

TrainedModel train_unconstrained(const SimilarityMatrix& S, const TrainConfig& config, const TrainHooks& hooks = {});
TrainedModel train_symmetric(const SimilarityMatrix& S, const TrainConfig& config, const TrainHooks& hooks = {});
TrainedModel train_lin_lin(const Eigen::MatrixXd& X, const SimilarityMatrix& S, const TrainConfig& config,
                           const TrainHooks& hooks = {});
TrainedModel train_lin_v(const Eigen::MatrixXd& X, const SimilarityMatrix& S, const TrainConfig& config,
                         const TrainHooks& hooks = {});

// Dispatches on `variant`; X may be null for UV and SYM. LSH builds the
// random-hyperplane baseline and calls on_stage once per prefix length.
TrainedModel train(Variant variant, const Eigen::MatrixXd* X, const SimilarityMatrix& S, const TrainConfig& config,
                   const TrainHooks& hooks = {});

// Training-set loss of a model's stored codes.
double training_loss(const TrainedModel& model, const SimilarityMatrix& S, const LossParams& params);

}  // namespace asymhash
