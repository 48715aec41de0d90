#pragma once

// The `asymhash` command line, callable in-process.
//
//   gen        synthetic data and ground-truth similarity
//   train      fit one variant, write model, codes and loss trace
//   eval       AP and precision-recall of a model
//   theorem1   asymmetric construction vs. symmetric training probes
//   retrieve   Hamming top-R lookup for hashed queries
//   bits       bits needed to reach AP targets, symmetric vs. asymmetric
//   replay     re-run a command from its manifest
//
// Exit codes: 0 success, 2 invalid input or flags, 1 anything else.

#include <iosfwd>
#include <string>
#include <vector>

#include "asymhash/datagen.hpp"

namespace asymhash::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Largest fraction of correctly signed pairs over all thresholds.
double best_threshold_accuracy(const PackedCodeMatrix& U, const PackedCodeMatrix& V, const SimilarityMatrix& S);

}  // namespace asymhash::cli
