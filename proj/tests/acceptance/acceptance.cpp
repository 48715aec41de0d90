// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "asymhash/cli.hpp"
#include "support.hpp"

using namespace asymhash;
namespace fs = std::filesystem;
using testing_support::all_sign_vectors;
using testing_support::naive_loss;
using testing_support::random_sign_matrix;
using testing_support::random_signs;
using testing_support::random_similarity;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << " [" << id << "] " << title << ": " << detail << std::endl;
  failures += !pass;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int run_cli(const std::vector<std::string>& args, std::string* captured = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (captured) *captured = out.str();
  if (code != 0) std::cerr << err.str();
  return code;
}

// ------------------------------------------------------------------------

void criterion_theorem1_exact() {
  bool ok = true;
  double worst_time = 0.0, worst_margin = std::numeric_limits<double>::infinity();
  for (int r = 2; r <= 6; ++r) {
    const auto t0 = Clock::now();
    std::string out;
    ok &= run_cli({"theorem1", "--r", std::to_string(r), "--seeds", "1"}, &out) == 0;
    const double secs = seconds_since(t0);
    worst_time = std::max(worst_time, secs);
    ok &= secs < 1.0;
    // Row: r,n,2r,n/2,asym_exact,min_margin,...
    std::istringstream in(out);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::vector<std::string> cells;
    std::stringstream rs(row);
    for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
    ok &= cells.size() == 8 && cells[4] == "yes" && std::stod(cells[5]) >= 1.0;

    // Independent recomputation of every margin from the unpacked codes.
    const Theorem1Instance inst = theorem1_instance(r);
    ok &= inst.U.k() == static_cast<std::size_t>(2 * r);
    const SignMatrix U = inst.U.to_signs(), V = inst.V.to_signs();
    for (std::size_t i = 0; i < inst.n; ++i) {
      for (std::size_t j = 0; j < inst.n; ++j) {
        double y = -inst.theta;
        for (std::size_t t = 0; t < U.rows(); ++t) y += U(t, i) * V(t, j);
        const double dist2 = (inst.points.col(static_cast<Eigen::Index>(i)) - inst.points.col(static_cast<Eigen::Index>(j))).squaredNorm();
        const int s = dist2 <= 1.0 ? 1 : -1;
        ok &= s == inst.S(i, j);
        worst_margin = std::min(worst_margin, s * y);
      }
    }
  }
  ok &= worst_margin >= 1.0;
  report(1, "theorem-1 exactness", ok,
         "r=2..6 exact at 2r bits, min margin " + num(worst_margin, 1) + ", slowest " + num(worst_time, 3) + " s");
}

void criterion_symmetric_infeasible() {
  bool ok = true;
  double best = 0.0;
  for (int r : {4, 5}) {
    const Theorem1Instance inst = theorem1_instance(r);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      TrainConfig c;
      c.k_max = static_cast<std::size_t>(2 * r);
      c.seed = seed;
      const TrainedModel m = train_symmetric(inst.S, c);
      const double acc = cli::best_threshold_accuracy(m.query_codes, m.database_codes, inst.S);
      best = std::max(best, acc);
      ok &= acc < 1.0;
      ok &= !verify_exact_realization(m.query_codes, m.database_codes, m.theta, inst.S).exact;
    }
  }
  report(2, "symmetric infeasibility", ok,
         "r=4,5 at k=2r over 10 seeds, best pair accuracy at any threshold " + num(best));
}

void criterion_decomposition() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (auto surrogate : {Surrogate::kSqrtLogistic, Surrogate::kZeroOne}) {
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t n = 1 + rng() % 8, k = 1 + rng() % 5, t = rng() % k;
      const auto U = random_sign_matrix(k, n, rng), V = random_sign_matrix(k, n, rng);
      const auto S = random_similarity(n, n, rng);
      const double theta = (rep % 2) ? testing_support::uniform(rng, -4.0, 4.0)
                                     : static_cast<double>(static_cast<int>(rng() % 9) - 4);
      const LossParams p{testing_support::uniform(rng, 0.05, 0.95), surrogate};
      const UpdateContext ctx = build_update_context(U, V, theta, t, S, p);
      double umv = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          umv += U(t, i) * ctx.M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * V(t, j);
        }
      }
      worst = std::max(worst, std::abs(naive_loss(U, V, theta, S, p.beta, surrogate) - (ctx.C - umv)));
    }
  }
  const double secs = seconds_since(t0);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", worst);
  report(3, "row decomposition identity", worst <= 1e-10 && secs < 5.0,
         "400 instances, max error " + std::string(buf) + " in " + num(secs, 3) + " s");
}

void criterion_row_update() {
  std::mt19937_64 rng(7);
  std::size_t mismatches = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rep) % 12;
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd M(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j = 0; j < N; ++j) M(i, j) = testing_support::uniform(rng, -1.0, 1.0);
    }
    const auto v = random_signs(n, rng);
    const auto u = update_row_exact(M, v, RowSide::kQuery);
    auto value = [&](const std::vector<std::int8_t>& a) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) s += a[i] * M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * v[j];
      }
      return s;
    };
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::int8_t> arg;
    for (const auto& c : all_sign_vectors(n)) {
      if (const double val = value(c); val > best) {
        best = val;
        arg = c;
      }
    }
    mismatches += u != arg;
  }
  report(4, "exact row update optimality", mismatches == 0,
         "100 random (M, v), n=1..12, " + std::to_string(mismatches) + " mismatches against enumeration");
}

void criterion_monotone() {
  const Dataset d = gen_uniform(80, 5, 11);
  const SimilarityMatrix S = build_similarity(d.X, threshold_for_positive_fraction(d.X, 0.3));
  std::size_t runs = 0, violations = 0;
  for (Variant v : {Variant::kUV, Variant::kSym, Variant::kLinLin, Variant::kLinV}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      TrainConfig c;
      c.k_max = 6;
      c.seed = seed;
      const TrainedModel m = train(v, &d.X, S, c);
      ++runs;
      for (std::size_t e = 1; e < m.loss_trace.size(); ++e) {
        violations += m.loss_trace[e].loss > m.loss_trace[e - 1].loss + 1e-9;
      }
    }
  }
  report(5, "loss trace monotonicity", violations == 0,
         std::to_string(runs) + " runs over uv/sym/linlin/linv, " + std::to_string(violations) + " increases");
}

struct DeskData {
  Eigen::MatrixXd train;
  SimilarityMatrix S;
  HoldOut holdout;
};

DeskData desk_data(std::uint64_t seed) {
  Dataset all = gen_uniform(1000, 10, seed);
  tag_train_prefix(all, 500);
  DeskData out;
  out.train = all.subset(Split::kTrain);
  const Eigen::MatrixXd test = all.subset(Split::kTest);
  const double radius = threshold_for_positive_fraction(out.train, 0.3);
  out.S = build_similarity(out.train, radius);
  out.holdout = HoldOut{test, build_cross_similarity(test, out.train, radius)};
  return out;
}

void criteria_desk_scale() {
  const auto t0 = Clock::now();
  const std::vector<std::size_t> ks{4, 8, 16};
  std::map<Variant, std::vector<std::vector<double>>> ap;  // variant -> per k -> per seed
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DeskData data = desk_data(seed);
    TrainConfig c;
    c.k_max = 16;
    c.beta = 0.7;
    c.seed = seed;
    for (Variant v : {Variant::kUV, Variant::kSym, Variant::kLinV, Variant::kLinLin, Variant::kLsh}) {
      const auto curve = ap_by_bits(v, &data.train, data.S, c, is_linear(v) ? &data.holdout : nullptr);
      auto& slot = ap[v];
      slot.resize(ks.size());
      for (std::size_t i = 0; i < ks.size(); ++i) slot[i].push_back(curve[ks[i] - 1]);
    }
  }
  auto med = [&](Variant v, std::size_t i) { return median(ap[v][i]); };

  bool ok6 = med(Variant::kUV, 1) > med(Variant::kSym, 1);
  std::string d6;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    ok6 &= med(Variant::kUV, i) >= med(Variant::kSym, i) - 0.02;
    d6 += "k=" + std::to_string(ks[i]) + " uv " + num(med(Variant::kUV, i)) + " sym " + num(med(Variant::kSym, i)) +
          (i + 1 < ks.size() ? "; " : "");
  }
  report(6, "asymmetric vs symmetric AP (n=500, 30% positive)", ok6, d6);

  const double linv16 = med(Variant::kLinV, 2), linlin16 = med(Variant::kLinLin, 2), lsh16 = med(Variant::kLsh, 2);
  bool ok7 = linv16 >= lsh16 + 0.05 && linlin16 >= lsh16 + 0.05;
  ok7 &= med(Variant::kLinV, 0) >= med(Variant::kLinLin, 0) - 0.02;
  ok7 &= med(Variant::kLinV, 1) >= med(Variant::kLinLin, 1) - 0.02;
  report(7, "linear variants vs LSH (held-out queries)", ok7,
         "k=16 linv " + num(linv16) + " linlin " + num(linlin16) + " lsh " + num(lsh16) + "; k=4 linv " +
             num(med(Variant::kLinV, 0)) + " linlin " + num(med(Variant::kLinLin, 0)) + "; k=8 linv " +
             num(med(Variant::kLinV, 1)) + " linlin " + num(med(Variant::kLinLin, 1)) + "; " +
             num(seconds_since(t0), 1) + " s for both");
}

void criterion_ap_oracle() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<ScoredLabel> items(n);
    for (auto& it : items) {
      it.score = (rep % 2) ? static_cast<double>(rng() % 9) : testing_support::uniform(rng, -1.0, 1.0);
      it.label = (rng() % 3 == 0) ? 1 : -1;
    }
    items[rng() % n].label = 1;
    worst = std::max(worst, std::abs(average_precision(items) - testing_support::oracle_ap(items)));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", worst);
  report(8, "average precision oracle", worst <= 1e-12, "1000 lists, max error " + std::string(buf));
}

void criterion_kernels() {
  std::mt19937_64 rng(5);
  std::size_t violations = 0;
  for (int rep = 0; rep < 100000; ++rep) {
    const std::size_t k = 1 + rng() % kMaxBits;
    const auto u = random_signs(k, rng), v = random_signs(k, rng);
    int dot = 0;
    for (std::size_t b = 0; b < k; ++b) dot += u[b] * v[b];
    const auto pu = pack(u), pv = pack(v);
    const int ip = inner_product(pu, pv, k);
    violations += ip != static_cast<int>(k) - 2 * hamming(pu, pv, k) || ip != dot;
  }
  std::size_t scan_mismatch = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t k = 1 + rng() % 200, n = 1 + rng() % 300, R = 1 + rng() % (n + 5);
    const SignMatrix codes = random_sign_matrix(k, n, rng);
    std::vector<std::string> ids(n);
    for (std::size_t j = 0; j < n; ++j) ids[j] = std::to_string((j * 37) % 1009) + "_" + std::to_string(j);
    const CodeDatabase db(PackedCodeMatrix::from_signs(codes), ids);
    const auto q = random_signs(k, rng);
    std::vector<Hit> ref;
    for (std::size_t j = 0; j < n; ++j) {
      int dist = 0;
      for (std::size_t b = 0; b < k; ++b) dist += codes(b, j) != q[b];
      ref.push_back({ids[j], dist});
    }
    std::sort(ref.begin(), ref.end(), [](const Hit& a, const Hit& b) {
      return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
    });
    ref.resize(std::min(R, n));
    scan_mismatch += scan_top_r(db, pack(q), R) != ref;
  }
  report(9, "packed kernels and scan", violations == 0 && scan_mismatch == 0,
         "1e5 pairs with " + std::to_string(violations) + " identity violations; 100 databases with " +
             std::to_string(scan_mismatch) + " scan mismatches");
}

void criterion_determinism() {
  const fs::path dir = fs::temp_directory_path() / "asymhash_acceptance_pipeline";
  fs::remove_all(dir);
  const std::string out = dir.string();
  bool ok = true;
  ok &= run_cli({"gen", "--n", "300", "--train-n", "150", "--positive-frac", "0.3", "--seed", "5", "--out", out}) == 0;
  const std::string data = (dir / "data").string();
  ok &= run_cli({"train", "--variant", "linv", "--k", "8", "--seed", "5", "--data", data + "/train.abhx", "--sim",
                 data + "/sim_train.abhs", "--out", out}) == 0;
  ok &= run_cli({"eval", "--model", out + "/models/linv.model", "--test", data + "/test.abhx", "--db",
                 data + "/train.abhx", "--sim", data + "/sim_cross.abhr", "--out", out}) == 0;
  const std::vector<fs::path> csvs{dir / "csv" / "linv_loss.csv", dir / "reports" / "linv_ap.csv",
                                   dir / "reports" / "linv_pr.csv"};
  std::vector<std::string> first;
  for (const auto& p : csvs) first.push_back(slurp(p));

  for (const char* sub : {"data", "models", "csv", "reports"}) fs::remove_all(dir / sub);
  for (const char* m : {"gen", "train_linv", "eval_linv"}) {
    ok &= run_cli({"replay", "--manifest", (dir / "manifests" / (std::string(m) + ".json")).string()}) == 0;
  }
  std::size_t identical = 0;
  for (std::size_t i = 0; i < csvs.size(); ++i) identical += !first[i].empty() && slurp(csvs[i]) == first[i];
  ok &= identical == csvs.size();
  report(10, "pipeline determinism", ok,
         "gen -> train -> eval replayed from manifests, " + std::to_string(identical) + "/" +
             std::to_string(csvs.size()) + " CSVs byte-identical");
}

}  // namespace

int main() {
  criterion_theorem1_exact();
  criterion_symmetric_infeasible();
  criterion_decomposition();
  criterion_row_update();
  criterion_monotone();
  criteria_desk_scale();
  criterion_ap_oracle();
  criterion_kernels();
  criterion_determinism();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
