#pragma once

// Flat-file formats. All binary integers and floats are little-endian.
//
//   codes       "ABHC" u32 k, u32 n, n columns of ceil(k/64) u64 words
//   dataset     "ABHX" u32 d, u32 n, d*n f64 column-major
//               or CSV, one point per row, d comma-separated columns
//   similarity  "ABHS" u32 n, n*n sign bits row-major (bit i*n+j set iff
//               S_ij = +1), packed LSB-first into ceil(n*n/64) u64 words
//               "ABHR" u32 rows, u32 cols, same packing for rectangular S
//   ids         one id per line
//   model       text header, then the binary blocks it announces

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asymhash/bitcode.hpp"
#include "asymhash/datagen.hpp"
#include "asymhash/train.hpp"

namespace asymhash {

void write_codes(std::ostream& out, const PackedCodeMatrix& codes);
PackedCodeMatrix read_codes(std::istream& in);
void save_codes(const std::filesystem::path& path, const PackedCodeMatrix& codes);
PackedCodeMatrix load_codes(const std::filesystem::path& path);

void save_dataset_binary(const std::filesystem::path& path, const Eigen::MatrixXd& X);
void save_dataset_csv(const std::filesystem::path& path, const Eigen::MatrixXd& X);
// Detects the binary format by its magic; anything else is parsed as CSV.
Eigen::MatrixXd load_dataset(const std::filesystem::path& path);

void save_similarity(const std::filesystem::path& path, const SimilarityMatrix& S);
SimilarityMatrix load_similarity(const std::filesystem::path& path);

void save_ids(const std::filesystem::path& path, const std::vector<std::string>& ids);
std::vector<std::string> load_ids(const std::filesystem::path& path);

void write_model(std::ostream& out, const TrainedModel& model);
TrainedModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace asymhash
