#include "asymhash/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "asymhash/asymhash.hpp"

namespace asymhash::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  ensure_dir(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return f;
}

void write_manifest(const fs::path& out_dir, const std::string& name, const std::vector<std::string>& args,
                    std::uint64_t seed) {
  json m;
  m["argv"] = args;
  m["command"] = args.empty() ? std::string() : args.front();
  m["seed"] = seed;
  m["version"] = kVersion;
  auto f = open_out(out_dir / "manifests" / (name + ".json"));
  f << m.dump(2) << '\n';
}

Eigen::MatrixXd load_or_empty(const std::string& path) {
  return path.empty() ? Eigen::MatrixXd() : load_dataset(path);
}

fs::path ids_sidecar(const fs::path& codes_path) {
  fs::path p = codes_path;
  p.replace_extension(".ids");
  return p;
}

// ------------------------------------------------------------------ gen

struct GenOptions {
  std::size_t n = 0;
  std::size_t d = 10;
  std::uint64_t seed = 0;
  double neighbors = 0.0;
  double positive_frac = 0.0;
  std::size_t train_n = 0;
  std::string radius_on = "train";
  bool csv = false;
  std::string out = ".";
};

void cmd_gen(const GenOptions& o, bool by_fraction, const std::vector<std::string>& args, std::ostream& out) {
  Dataset data = gen_uniform(o.n, o.d, o.seed);
  const std::size_t train_n = o.train_n ? o.train_n : std::max<std::size_t>(2, o.n / 4);
  if (train_n < 2 || train_n > o.n) throw std::invalid_argument("--train-n must lie in [2, n]");
  tag_train_prefix(data, train_n);
  const Eigen::MatrixXd train = data.subset(Split::kTrain);
  const Eigen::MatrixXd test = data.subset(Split::kTest);
  const Eigen::MatrixXd& basis = o.radius_on == "all" ? data.X : train;
  const double radius = by_fraction ? threshold_for_positive_fraction(basis, o.positive_frac)
                                    : threshold_for_avg_neighbors(basis, o.neighbors);
  const SimilarityMatrix S = build_similarity(train, radius);

  const fs::path dir = fs::path(o.out) / "data";
  ensure_dir(dir);
  save_dataset_binary(dir / "train.abhx", train);
  if (o.csv) save_dataset_csv(dir / "train.csv", train);
  save_similarity(dir / "sim_train.abhs", S);
  std::size_t cross_pos = 0;
  if (test.cols() > 0) {
    const SimilarityMatrix cross = build_cross_similarity(test, train, radius);
    cross_pos = cross.positive_count();
    save_dataset_binary(dir / "test.abhx", test);
    if (o.csv) save_dataset_csv(dir / "test.csv", test);
    save_similarity(dir / "sim_cross.abhr", cross);
  }
  write_manifest(o.out, "gen", args, o.seed);

  out << "radius " << fixed6(radius) << '\n';
  out << "positive_fraction " << fixed6(S.positive_fraction()) << '\n';
  out << "mean_neighbors " << fixed6(S.positive_fraction() * static_cast<double>(train_n - 1)) << '\n';
  out << "train " << train_n << '\n';
  out << "test " << test.cols() << '\n';
  if (test.cols() > 0) {
    out << "cross_positive_fraction "
        << fixed6(static_cast<double>(cross_pos) / static_cast<double>(test.cols() * train.cols())) << '\n';
  }
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string variant = "uv";
  TrainConfig config;
  std::string init = "best";
  std::string surrogate = "sqrt-logistic";
  bool no_center = false;
  bool fixed_theta = false;
  std::string data;
  std::string sim;
  std::string ids;
  std::string out = ".";
};

Surrogate parse_surrogate(const std::string& s) {
  if (s == "sqrt-logistic") return Surrogate::kSqrtLogistic;
  if (s == "zero-one") return Surrogate::kZeroOne;
  throw std::invalid_argument("unknown surrogate '" + s + "'");
}

void cmd_train(TrainOptions o, const std::vector<std::string>& args, std::ostream& out) {
  const Variant variant = parse_variant(o.variant);
  o.config.init = parse_init(o.init);
  o.config.surrogate = parse_surrogate(o.surrogate);
  o.config.center = !o.no_center;
  o.config.update_theta = !o.fixed_theta;
  validate(o.config);
  const SimilarityMatrix S = load_similarity(o.sim);
  const Eigen::MatrixXd X = load_or_empty(o.data);
  if (is_linear(variant) && X.size() == 0) {
    throw std::invalid_argument("variant " + o.variant + " needs --data");
  }
  const TrainedModel model = train(variant, X.size() ? &X : nullptr, S, o.config);

  const std::string name = to_string(variant);
  const fs::path models = fs::path(o.out) / "models";
  ensure_dir(models);
  save_model(models / (name + ".model"), model);
  save_codes(models / (name + "_db.abhc"), model.database_codes);
  std::vector<std::string> ids = o.ids.empty() ? std::vector<std::string>() : load_ids(o.ids);
  if (ids.empty()) {
    for (std::size_t j = 0; j < model.database_codes.n(); ++j) ids.push_back(std::to_string(j));
  }
  if (ids.size() != model.database_codes.n()) throw std::invalid_argument("--ids count does not match the data");
  save_ids(models / (name + "_db.ids"), ids);

  {
    auto f = open_out(fs::path(o.out) / "csv" / (name + "_loss.csv"));
    f << "k,sweep,loss\n";
    for (const TraceEntry& e : model.loss_trace) f << e.k << ',' << e.sweep << ',' << format_double(e.loss) << '\n';
  }
  write_manifest(o.out, "train_" + name, args, o.config.seed);

  const Realization real = verify_exact_realization(model.query_codes, model.database_codes, model.theta, S);
  const std::size_t pairs = S.rows() * S.cols();
  out << "variant " << name << '\n';
  out << "k " << model.k << '\n';
  out << "theta " << fixed6(model.theta) << '\n';
  out << "loss " << fixed6(model.loss_trace.empty() ? 0.0 : model.loss_trace.back().loss) << '\n';
  out << "pair_accuracy " << fixed6(1.0 - static_cast<double>(real.violations) / static_cast<double>(pairs)) << '\n';
  out << "exact " << (real.exact ? "yes" : "no") << '\n';
}

// ----------------------------------------------------------------- eval

struct EvalOptions {
  std::string model;
  std::string test;
  std::string db;
  std::string sim;
  std::string report;
  bool macro = false;
  std::string out = ".";
};

void cmd_eval(const EvalOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const TrainedModel model = load_model(o.model);
  const SimilarityMatrix S = load_similarity(o.sim);
  const Eigen::MatrixXd X_test = load_or_empty(o.test);
  const Eigen::MatrixXd X_db = load_or_empty(o.db);
  const EvalReport rep = evaluate_model(model, X_test.size() ? &X_test : nullptr, X_db.size() ? &X_db : nullptr, S,
                                        o.macro ? Pooling::kMacro : Pooling::kMicro);
  const std::string name = o.report.empty() ? fs::path(o.model).stem().string() : o.report;
  const fs::path dir = fs::path(o.out) / "reports";
  {
    auto f = open_out(dir / (name + "_ap.csv"));
    f << "k,ap\n" << model.k << ',' << format_double(rep.ap) << '\n';
  }
  {
    auto f = open_out(dir / (name + "_pr.csv"));
    f << "theta,precision,recall\n";
    for (const PrPoint& p : rep.pr_points) {
      f << format_double(p.threshold) << ',' << format_double(p.precision) << ',' << format_double(p.recall) << '\n';
    }
  }
  write_manifest(o.out, "eval_" + name, args, 0);
  out << "model " << to_string(model.variant) << '\n';
  out << "k " << model.k << '\n';
  out << "ap " << fixed6(rep.ap) << '\n';
  out << "pairs " << rep.pairs << '\n';
  out << "positives " << rep.positives << '\n';
  out << "pr_points " << rep.pr_points.size() << '\n';
}

// ------------------------------------------------------------- theorem1

struct Theorem1Options {
  std::vector<int> r{5};
  int probe_k = 0;  // 0: use 2r
  std::size_t seeds = 10;
  std::string out;
};

void cmd_theorem1(const Theorem1Options& o, const std::vector<std::string>& args, std::ostream& out) {
  std::ostringstream table;
  table << "r,n,2r,n/2,asym_exact,min_margin,sym_k,best_sym_accuracy\n";
  for (int r : o.r) {
    const Theorem1Instance inst = theorem1_instance(r);
    const Realization real = verify_exact_realization(inst.U, inst.V, inst.theta, inst.S);
    const std::size_t sym_k = o.probe_k > 0 ? static_cast<std::size_t>(o.probe_k) : static_cast<std::size_t>(2 * r);
    double best = 0.0;
    for (std::size_t s = 0; s < o.seeds; ++s) {
      TrainConfig c;
      c.k_max = sym_k;
      c.seed = s;
      const TrainedModel m = train_symmetric(inst.S, c);
      best = std::max(best, best_threshold_accuracy(m.query_codes, m.database_codes, inst.S));
    }
    table << r << ',' << inst.n << ',' << 2 * r << ',' << inst.n / 2 << ',' << (real.exact ? "yes" : "no") << ','
          << format_double(real.min_margin) << ',' << sym_k << ',' << fixed6(best) << '\n';
  }
  out << table.str();
  if (!o.out.empty()) {
    auto f = open_out(fs::path(o.out) / "reports" / "theorem1.csv");
    f << table.str();
    write_manifest(o.out, "theorem1", args, 0);
  }
}

// ------------------------------------------------------------- retrieve

struct RetrieveOptions {
  std::string db_codes;
  std::string ids;
  std::string model;
  std::string query_file;
  std::string query_codes;
  std::size_t top = 10;
};

void cmd_retrieve(const RetrieveOptions& o, std::ostream& out) {
  PackedCodeMatrix codes = load_codes(o.db_codes);
  std::vector<std::string> ids;
  if (!o.ids.empty()) {
    ids = load_ids(o.ids);
  } else if (fs::exists(ids_sidecar(o.db_codes))) {
    ids = load_ids(ids_sidecar(o.db_codes));
  }
  const CodeDatabase db(std::move(codes), std::move(ids));

  PackedCodeMatrix queries;
  if (!o.query_codes.empty()) {
    queries = load_codes(o.query_codes);
  } else {
    if (o.model.empty() || o.query_file.empty()) {
      throw std::invalid_argument("retrieve needs --query-codes, or --model with --query-file");
    }
    const TrainedModel model = load_model(o.model);
    if (!model.query_hash) throw std::invalid_argument("model has no query map; pass --query-codes instead");
    queries = model.query_hash->encode(load_dataset(o.query_file));
  }
  if (queries.k() != db.bits()) {
    throw std::invalid_argument("query codes have " + std::to_string(queries.k()) + " bits but the database has " +
                                std::to_string(db.bits()));
  }
  for (std::size_t q = 0; q < queries.n(); ++q) {
    for (const Hit& h : scan_top_r(db, queries.column(q), o.top)) {
      out << q << ' ' << h.id << ' ' << h.distance << '\n';
    }
  }
}

// ----------------------------------------------------------------- bits

struct BitsOptions {
  std::string sim;
  std::string data;
  std::string test;
  std::string cross_sim;
  std::string sym_variant = "sym";
  std::string asym_variant = "uv";
  std::vector<double> targets{0.5, 0.6, 0.7, 0.8, 0.9};
  TrainConfig config;
  std::string out = ".";
};

void cmd_bits(BitsOptions o, const std::vector<std::string>& args, std::ostream& out) {
  validate(o.config);
  const Variant sym = parse_variant(o.sym_variant);
  const Variant asym = parse_variant(o.asym_variant);
  const SimilarityMatrix S = load_similarity(o.sim);
  const Eigen::MatrixXd X = load_or_empty(o.data);
  if ((is_linear(sym) || is_linear(asym)) && X.size() == 0) throw std::invalid_argument("linear variants need --data");
  std::optional<HoldOut> holdout;
  if (!o.test.empty()) {
    if (o.cross_sim.empty()) throw std::invalid_argument("--test needs --cross-sim");
    holdout = HoldOut{load_dataset(o.test), load_similarity(o.cross_sim)};
  }
  const Eigen::MatrixXd* xp = X.size() ? &X : nullptr;
  auto curve = [&](Variant v) {
    return ap_by_bits(v, xp, S, o.config, is_linear(v) && holdout ? &*holdout : nullptr);
  };
  const std::vector<double> ap_sym = curve(sym);
  const std::vector<double> ap_asym = curve(asym);
  const auto rows_sym = first_bits_reaching(o.targets, ap_sym);
  const auto rows_asym = first_bits_reaching(o.targets, ap_asym);

  std::ostringstream table;
  table << "ap_target,k_sym,k_asym\n";
  auto cell = [](const BitsRow& r) { return r.k ? std::to_string(*r.k) : std::string("NA"); };
  for (std::size_t i = 0; i < o.targets.size(); ++i) {
    table << format_double(o.targets[i]) << ',' << cell(rows_sym[i]) << ',' << cell(rows_asym[i]) << '\n';
  }
  {
    auto f = open_out(fs::path(o.out) / "csv" / "bits.csv");
    f << table.str();
  }
  {
    auto f = open_out(fs::path(o.out) / "csv" / "ap_by_k.csv");
    f << "k,ap_" << o.sym_variant << ",ap_" << o.asym_variant << '\n';
    for (std::size_t k = 0; k < ap_sym.size(); ++k) {
      f << k + 1 << ',' << format_double(ap_sym[k]) << ',' << format_double(ap_asym[k]) << '\n';
    }
  }
  write_manifest(o.out, "bits", args, o.config.seed);
  out << table.str();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

void cmd_replay(const std::string& manifest, std::ostream& out, std::ostream& err, int depth) {
  std::ifstream f(manifest);
  if (!f) throw std::runtime_error("cannot open manifest " + manifest);
  json m;
  try {
    f >> m;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest " + manifest + ": " + e.what());
  }
  if (!m.contains("argv") || !m["argv"].is_array()) throw std::runtime_error("manifest has no argv array");
  const auto argv = m["argv"].get<std::vector<std::string>>();
  if (argv.empty() || argv.front() == "replay") throw std::invalid_argument("manifest does not name a command");
  const int code = dispatch(argv, out, err, depth + 1);
  if (code != kExitOk) throw std::runtime_error("replayed command exited with " + std::to_string(code));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  CLI::App app{"Learn and evaluate short binary hash codes", "asymhash"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::function<void()> action;

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate uniform data and distance-threshold similarity");
  g->add_option("--n", gen.n, "Total number of points")->required();
  g->add_option("--d", gen.d, "Dimension")->capture_default_str();
  g->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  auto* neighbors = g->add_option("--neighbors", gen.neighbors, "Target mean neighbour count");
  auto* frac = g->add_option("--positive-frac", gen.positive_frac, "Target positive pair fraction");
  neighbors->excludes(frac);
  g->add_option("--train-n", gen.train_n, "Training points (default n/4)");
  g->add_option("--radius-on", gen.radius_on, "Points used to pick the radius")
      ->check(CLI::IsMember({"train", "all"}))
      ->capture_default_str();
  g->add_flag("--csv", gen.csv, "Also write CSV copies of the data");
  g->add_option("--out", gen.out, "Output directory")->capture_default_str();
  g->callback([&] {
    const bool by_fraction = frac->count() > 0;
    if (!by_fraction && neighbors->count() == 0) gen.neighbors = 50.0;
    action = [&, by_fraction] { cmd_gen(gen, by_fraction, args, out); };
  });

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train one code model");
  t->add_option("--variant", tr.variant, "uv | sym | linlin | linv | lsh")
      ->check(CLI::IsMember({"uv", "sym", "linlin", "linv", "lsh"}))
      ->capture_default_str();
  t->add_option("--k", tr.config.k_max, "Code length")->capture_default_str();
  t->add_option("--beta", tr.config.beta, "Weight on positive pairs")->capture_default_str();
  t->add_option("--seed", tr.config.seed, "Seed")->capture_default_str();
  t->add_option("--data", tr.data, "Training points (.abhx or CSV)");
  t->add_option("--sim", tr.sim, "Training similarity (.abhs)")->required();
  t->add_option("--ids", tr.ids, "Ids of the training objects, one per line");
  t->add_option("--init", tr.init, "random | rank-one | best")->capture_default_str();
  t->add_option("--surrogate", tr.surrogate, "sqrt-logistic | zero-one")->capture_default_str();
  t->add_option("--sweeps", tr.config.sweeps_per_bit, "Sweeps per bit")->capture_default_str();
  t->add_option("--epochs", tr.config.sgd_epochs, "SGD epochs per linear row update")->capture_default_str();
  t->add_option("--rate", tr.config.sgd_rate, "SGD step size")->capture_default_str();
  t->add_option("--theta-grid", tr.config.theta_grid, "Uniform theta candidates")->capture_default_str();
  t->add_flag("--no-center", tr.no_center, "Do not subtract the training mean before linear hashing");
  t->add_flag("--fixed-theta", tr.fixed_theta, "Do not re-fit theta during training");
  t->add_option("--out", tr.out, "Output directory")->capture_default_str();
  t->callback([&] { action = [&] { cmd_train(tr, args, out); }; });

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "Average precision and PR curve of a model");
  e->add_option("--model", ev.model, "Model file")->required();
  e->add_option("--test", ev.test, "Query points; omit to score stored training codes");
  e->add_option("--db", ev.db, "Database points, hashed for LIN:LIN and LSH");
  e->add_option("--sim", ev.sim, "Ground truth, queries x database")->required();
  e->add_option("--report", ev.report, "Report name (default: model file stem)");
  e->add_flag("--macro", ev.macro, "Average per-query AP instead of pooling pairs");
  e->add_option("--out", ev.out, "Output directory")->capture_default_str();
  e->callback([&] { action = [&] { cmd_eval(ev, args, out); }; });

  Theorem1Options th;
  auto* h = app.add_subcommand("theorem1", "Asymmetric 2r-bit construction vs. symmetric probes");
  h->add_option("--r", th.r, "Scale parameter(s), n = 2^r")->delimiter(',')->capture_default_str();
  h->add_option("--probe-symmetric-k", th.probe_k, "Symmetric probe bits (default 2r)");
  h->add_option("--seeds", th.seeds, "Symmetric probe seeds")->capture_default_str();
  h->add_option("--out", th.out, "Also write reports/theorem1.csv here");
  h->callback([&] { action = [&] { cmd_theorem1(th, args, out); }; });

  RetrieveOptions rt;
  auto* q = app.add_subcommand("retrieve", "Top-R Hamming lookup");
  q->add_option("--db-codes", rt.db_codes, "Database codes (.abhc)")->required();
  q->add_option("--ids", rt.ids, "Database ids (default: sidecar .ids next to the codes)");
  q->add_option("--model", rt.model, "Model whose query map hashes --query-file");
  q->add_option("--query-file", rt.query_file, "Query points (.abhx or CSV)");
  q->add_option("--query-codes", rt.query_codes, "Pre-hashed query codes (.abhc)");
  q->add_option("--top", rt.top, "Results per query")->capture_default_str();
  q->callback([&] { action = [&] { cmd_retrieve(rt, out); }; });

  BitsOptions bt;
  auto* b = app.add_subcommand("bits", "Bits needed to reach AP targets");
  b->add_option("--sim", bt.sim, "Training similarity (.abhs)")->required();
  b->add_option("--data", bt.data, "Training points, needed by linear variants");
  b->add_option("--test", bt.test, "Held-out queries for linear variants");
  b->add_option("--cross-sim", bt.cross_sim, "Held-out ground truth, test x train");
  b->add_option("--sym", bt.sym_variant, "Symmetric variant")->capture_default_str();
  b->add_option("--asym", bt.asym_variant, "Asymmetric variant")->capture_default_str();
  b->add_option("--targets", bt.targets, "AP targets in (0,1)")->delimiter(',')->capture_default_str();
  b->add_option("--k", bt.config.k_max, "Largest code length")->capture_default_str();
  b->add_option("--beta", bt.config.beta, "Weight on positive pairs")->capture_default_str();
  b->add_option("--seed", bt.config.seed, "Seed")->capture_default_str();
  b->add_option("--out", bt.out, "Output directory")->capture_default_str();
  b->callback([&] { action = [&] { cmd_bits(bt, args, out); }; });

  std::string manifest;
  auto* rp = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  rp->add_option("--manifest", manifest, "Manifest file")->required();
  rp->callback([&] { action = [&] { cmd_replay(manifest, out, err, depth); }; });

  if (depth > 4) throw std::invalid_argument("replay nesting too deep");
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }

  try {
    if (action) action();
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

double best_threshold_accuracy(const PackedCodeMatrix& U, const PackedCodeMatrix& V, const SimilarityMatrix& S) {
  if (U.k() != V.k() || U.n() != S.rows() || V.n() != S.cols()) {
    throw std::invalid_argument("best_threshold_accuracy: shape mismatch");
  }
  const int k = static_cast<int>(U.k());
  // Counts of similar / dissimilar pairs per product value p in [-k, k].
  std::vector<std::size_t> pos(2 * static_cast<std::size_t>(k) + 1, 0), neg(pos.size(), 0);
  for (std::size_t i = 0; i < S.rows(); ++i) {
    for (std::size_t j = 0; j < S.cols(); ++j) {
      const int p = inner_product(U.column(i), V.column(j), U.k());
      ++(S(i, j) > 0 ? pos : neg)[static_cast<std::size_t>(p + k)];
    }
  }
  // Threshold between p - 1 and p: pairs with product >= p predicted similar.
  std::size_t correct_best = 0;
  std::size_t neg_below = 0;
  std::size_t pos_above = 0;
  for (std::size_t c : pos) pos_above += c;
  for (std::size_t b = 0; b <= pos.size(); ++b) {
    correct_best = std::max(correct_best, neg_below + pos_above);
    if (b == pos.size()) break;
    neg_below += neg[b];
    pos_above -= pos[b];
  }
  return static_cast<double>(correct_best) / static_cast<double>(S.rows() * S.cols());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err, 0);
  } catch (const std::invalid_argument& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace asymhash::cli
