#include "asymhash/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace asymhash {
namespace {

using std::filesystem::path;

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b.data(), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(b.data(), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
  in.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw std::runtime_error(std::string("truncated ") + what);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in, const char* what) {
  std::array<unsigned char, 8> b{};
  read_exact(in, reinterpret_cast<char*>(b.data()), 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

double get_f64(std::istream& in, const char* what) { return std::bit_cast<double>(get_u64(in, what)); }

std::string get_magic(std::istream& in, const char* what) {
  std::string m(4, '\0');
  read_exact(in, m.data(), 4, what);
  return m;
}

void expect_magic(std::istream& in, const char* magic, const char* what) {
  if (get_magic(in, what) != magic) throw std::runtime_error(std::string("bad magic in ") + what);
}

std::ofstream open_out(const path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return out;
}

std::ifstream open_in(const path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return in;
}

void finish(std::ofstream& out, const path& p) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

double parse_double(std::string_view text, const char* what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::runtime_error(std::string("cannot parse number in ") + what);
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void write_sign_bits(std::ostream& out, std::span<const std::int8_t> values) {
  const std::size_t words = (values.size() + 63) / 64;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t word = 0;
    for (std::size_t b = 0; b < 64 && w * 64 + b < values.size(); ++b) {
      if (values[w * 64 + b] == 1) word |= std::uint64_t{1} << b;
    }
    put_u64(out, word);
  }
}

std::vector<std::int8_t> read_sign_bits(std::istream& in, std::size_t count) {
  std::vector<std::int8_t> values(count);
  const std::size_t words = (count + 63) / 64;
  for (std::size_t w = 0; w < words; ++w) {
    const std::uint64_t word = get_u64(in, "similarity file");
    for (std::size_t b = 0; b < 64 && w * 64 + b < count; ++b) values[w * 64 + b] = (word >> b) & 1U ? 1 : -1;
  }
  return values;
}

void write_linear(std::ostream& out, const LinearHash& h) {
  for (Eigen::Index t = 0; t < h.W.rows(); ++t) {
    for (Eigen::Index c = 0; c < h.W.cols(); ++c) put_f64(out, h.W(t, c));
  }
  for (Eigen::Index c = 0; c < h.center.size(); ++c) put_f64(out, h.center(c));
}

LinearHash read_linear(std::istream& in, std::size_t k, std::size_t d, bool centered) {
  LinearHash h;
  h.W.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  for (Eigen::Index t = 0; t < h.W.rows(); ++t) {
    for (Eigen::Index c = 0; c < h.W.cols(); ++c) h.W(t, c) = get_f64(in, "model weights");
  }
  if (centered) {
    h.center.resize(static_cast<Eigen::Index>(d));
    for (Eigen::Index c = 0; c < h.center.size(); ++c) h.center(c) = get_f64(in, "model center");
  }
  return h;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

// -------------------------------------------------------------------- codes

void write_codes(std::ostream& out, const PackedCodeMatrix& codes) {
  out.write("ABHC", 4);
  put_u32(out, static_cast<std::uint32_t>(codes.k()));
  put_u32(out, static_cast<std::uint32_t>(codes.n()));
  for (Word w : codes.words()) put_u64(out, w);
}

PackedCodeMatrix read_codes(std::istream& in) {
  expect_magic(in, "ABHC", "code file");
  const std::uint32_t k = get_u32(in, "code file");
  const std::uint32_t n = get_u32(in, "code file");
  if (k == 0 || k > kMaxBits) throw std::runtime_error("code file has invalid k");
  std::vector<Word> words(words_for(k) * n);
  for (auto& w : words) w = get_u64(in, "code file");
  try {
    return PackedCodeMatrix::from_words(k, n, std::move(words));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("corrupt code file: ") + e.what());
  }
}

void save_codes(const path& p, const PackedCodeMatrix& codes) {
  auto out = open_out(p);
  write_codes(out, codes);
  finish(out, p);
}

PackedCodeMatrix load_codes(const path& p) {
  auto in = open_in(p);
  return read_codes(in);
}

// ------------------------------------------------------------------ dataset

void save_dataset_binary(const path& p, const Eigen::MatrixXd& X) {
  auto out = open_out(p);
  out.write("ABHX", 4);
  put_u32(out, static_cast<std::uint32_t>(X.rows()));
  put_u32(out, static_cast<std::uint32_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) put_f64(out, X(i, j));
  }
  finish(out, p);
}

void save_dataset_csv(const path& p, const Eigen::MatrixXd& X) {
  auto out = open_out(p);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (i) out << ',';
      out << format_double(X(i, j));
    }
    out << '\n';
  }
  finish(out, p);
}

Eigen::MatrixXd load_dataset(const path& p) {
  auto in = open_in(p);
  std::string magic(4, '\0');
  in.read(magic.data(), 4);
  if (in.gcount() == 4 && magic == "ABHX") {
    const std::uint32_t d = get_u32(in, "dataset file");
    const std::uint32_t n = get_u32(in, "dataset file");
    Eigen::MatrixXd X(d, n);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = get_f64(in, "dataset file");
    }
    return X;
  }
  in.clear();
  in.seekg(0);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view l = trim(line);
    if (l.empty() || l.front() == '#') continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = l.find(',', start);
      row.push_back(parse_double(trim(l.substr(start, comma - start)), "dataset CSV"));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw std::runtime_error("ragged rows in dataset CSV");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset CSV " + p.string() + " is empty");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.front().size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < rows[j].size(); ++i) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
  }
  return X;
}

// --------------------------------------------------------------- similarity

void save_similarity(const path& p, const SimilarityMatrix& S) {
  auto out = open_out(p);
  if (S.square()) {
    out.write("ABHS", 4);
    put_u32(out, static_cast<std::uint32_t>(S.rows()));
  } else {
    out.write("ABHR", 4);
    put_u32(out, static_cast<std::uint32_t>(S.rows()));
    put_u32(out, static_cast<std::uint32_t>(S.cols()));
  }
  write_sign_bits(out, S.values());
  finish(out, p);
}

SimilarityMatrix load_similarity(const path& p) {
  auto in = open_in(p);
  const std::string magic = get_magic(in, "similarity file");
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (magic == "ABHS") {
    rows = cols = get_u32(in, "similarity file");
  } else if (magic == "ABHR") {
    rows = get_u32(in, "similarity file");
    cols = get_u32(in, "similarity file");
  } else {
    throw std::runtime_error("bad magic in similarity file " + p.string());
  }
  return SimilarityMatrix::from_values(rows, cols, read_sign_bits(in, rows * cols));
}

// ---------------------------------------------------------------------- ids

void save_ids(const path& p, const std::vector<std::string>& ids) {
  auto out = open_out(p);
  for (const auto& id : ids) out << id << '\n';
  finish(out, p);
}

std::vector<std::string> load_ids(const path& p) {
  auto in = open_in(p);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view l = trim(line);
    if (!l.empty()) ids.emplace_back(l);
  }
  return ids;
}

// -------------------------------------------------------------------- model

void write_model(std::ostream& out, const TrainedModel& model) {
  const LinearHash* q = model.query_hash ? &*model.query_hash : nullptr;
  const LinearHash* g = model.database_hash ? &*model.database_hash : nullptr;
  out << "asymhash-model 1\n";
  out << "variant " << to_string(model.variant) << '\n';
  out << "k " << model.k << '\n';
  out << "d " << (q ? q->dim() : 0) << '\n';
  out << "n_query " << model.query_codes.n() << '\n';
  out << "n_database " << model.database_codes.n() << '\n';
  out << "theta " << format_double(model.theta) << '\n';
  out << "beta " << format_double(model.beta) << '\n';
  out << "query_hash " << (q ? 1 : 0) << ' ' << (q && q->center.size() ? 1 : 0) << '\n';
  out << "database_hash " << (g ? 1 : 0) << ' ' << (g && g->center.size() ? 1 : 0) << '\n';
  out << "end\n";
  if (q) write_linear(out, *q);
  if (g) write_linear(out, *g);
  write_codes(out, model.query_codes);
  write_codes(out, model.database_codes);
}

TrainedModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "asymhash-model 1") throw std::runtime_error("not an asymhash model file");
  TrainedModel m;
  std::size_t d = 0;
  int has_q = 0, q_center = 0, has_g = 0, g_center = 0;
  while (std::getline(in, line) && line != "end") {
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "variant") {
      std::string v;
      fields >> v;
      m.variant = parse_variant(v);
    } else if (key == "k") {
      fields >> m.k;
    } else if (key == "d") {
      fields >> d;
    } else if (key == "theta" || key == "beta") {
      std::string v;
      fields >> v;
      (key == "theta" ? m.theta : m.beta) = parse_double(v, "model header");
    } else if (key == "query_hash") {
      fields >> has_q >> q_center;
    } else if (key == "database_hash") {
      fields >> has_g >> g_center;
    } else if (key == "n_query" || key == "n_database") {
      continue;  // implied by the code blocks
    } else {
      throw std::runtime_error("unknown model header field '" + key + "'");
    }
    if (fields.fail()) throw std::runtime_error("malformed model header line '" + line + "'");
  }
  if (line != "end") throw std::runtime_error("model header is not terminated");
  if (has_q) m.query_hash = read_linear(in, m.k, d, q_center != 0);
  if (has_g) m.database_hash = read_linear(in, m.k, d, g_center != 0);
  m.query_codes = read_codes(in);
  m.database_codes = read_codes(in);
  if (m.query_codes.k() != m.k || m.database_codes.k() != m.k) throw std::runtime_error("model code blocks disagree with k");
  return m;
}

void save_model(const path& p, const TrainedModel& model) {
  auto out = open_out(p);
  write_model(out, model);
  finish(out, p);
}

TrainedModel load_model(const path& p) {
  auto in = open_in(p);
  return read_model(in);
}

}  // namespace asymhash
