#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "asymhash/cli.hpp"
#include "support.hpp"

using namespace asymhash;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "asymhash_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string value_of(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
  }
  return {};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("help, version and usage errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"gen"}).code == cli::kExitUsage);
  CHECK(run({"gen", "--n", "50", "--neighbors", "5", "--positive-frac", "0.3"}).code == cli::kExitUsage);
  CHECK(run({"train", "--variant", "pca", "--sim", "x"}).code == cli::kExitUsage);
}

TEST_CASE("gen hits the positive fraction and is reproducible") {
  const fs::path a = fresh_dir("gen_a"), b = fresh_dir("gen_b");
  const Result r = run({"gen", "--n", "800", "--train-n", "400", "--positive-frac", "0.3", "--seed", "3", "--out",
                        a.string(), "--csv"});
  REQUIRE(r.code == 0);
  CHECK(std::abs(std::stod(value_of(r.out, "positive_fraction")) - 0.3) <= 0.01);
  CHECK(value_of(r.out, "train") == "400");
  CHECK(value_of(r.out, "test") == "400");
  REQUIRE(run({"gen", "--n", "800", "--train-n", "400", "--positive-frac", "0.3", "--seed", "3", "--out", b.string(),
               "--csv"})
              .code == 0);
  for (const char* f : {"train.abhx", "test.abhx", "sim_train.abhs", "sim_cross.abhr", "train.csv", "test.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / "data" / f) == slurp(b / "data" / f));
  }
  CHECK(load_dataset(a / "data" / "train.csv") == load_dataset(a / "data" / "train.abhx"));
  CHECK(load_similarity(a / "data" / "sim_cross.abhr").rows() == 400);
  CHECK(fs::exists(a / "manifests" / "gen.json"));
}

TEST_CASE("gen neighbour target") {
  const fs::path dir = fresh_dir("gen_nb");
  const Result r = run({"gen", "--n", "2000", "--neighbors", "50", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(std::abs(std::stod(value_of(r.out, "mean_neighbors")) - 50.0) <= 0.5);
}

TEST_CASE("train, eval and replay") {
  const fs::path dir = fresh_dir("pipeline");
  const std::string out = dir.string();
  REQUIRE(run({"gen", "--n", "120", "--train-n", "60", "--positive-frac", "0.3", "--seed", "1", "--out", out}).code == 0);
  const std::string train = (dir / "data" / "train.abhx").string(), test = (dir / "data" / "test.abhx").string();
  const std::string sim = (dir / "data" / "sim_train.abhs").string(), cross = (dir / "data" / "sim_cross.abhr").string();

  CHECK(run({"train", "--variant", "linv", "--sim", sim, "--out", out}).code == cli::kExitUsage);

  for (const std::string v : {"uv", "sym", "linlin", "linv", "lsh"}) {
    CAPTURE(v);
    const Result t = run({"train", "--variant", v, "--k", "4", "--seed", "2", "--data", train, "--sim", sim, "--out", out});
    REQUIRE(t.code == 0);
    CHECK(value_of(t.out, "k") == "4");
    const auto trace = read_csv(dir / "csv" / (v + "_loss.csv"));
    REQUIRE(trace.size() > 1);
    CHECK(trace[0] == std::vector<std::string>{"k", "sweep", "loss"});
    for (std::size_t i = 2; i < trace.size(); ++i) {
      if (trace[i][0] == trace[i - 1][0]) CHECK(std::stod(trace[i][2]) <= std::stod(trace[i - 1][2]) + 1e-9);
    }
    const std::string model = (dir / "models" / (v + ".model")).string();
    const bool linear = v != "uv" && v != "sym";
    std::vector<std::string> eval_args{"eval", "--model", model, "--sim", linear ? cross : sim, "--out", out};
    if (linear) {
      eval_args.insert(eval_args.end(), {"--test", test, "--db", train});
    }
    const Result e = run(eval_args);
    REQUIRE(e.code == 0);
    const auto ap = read_csv(dir / "reports" / (v + "_ap.csv"));
    REQUIRE(ap.size() == 2);
    CHECK(ap[1][0] == "4");
    CHECK(std::abs(std::stod(ap[1][1]) - std::stod(value_of(e.out, "ap"))) <= 1e-6);
    const auto pr = read_csv(dir / "reports" / (v + "_pr.csv"));
    CHECK(pr.size() - 1 == std::stoul(value_of(e.out, "pr_points")));
    // One point per distinct inner product.
    CHECK(pr.size() - 1 <= 5);
  }

  const std::string before = slurp(dir / "reports" / "uv_pr.csv");
  fs::remove(dir / "reports" / "uv_pr.csv");
  fs::remove(dir / "models" / "uv.model");
  REQUIRE(run({"replay", "--manifest", (dir / "manifests" / "train_uv.json").string()}).code == 0);
  REQUIRE(run({"replay", "--manifest", (dir / "manifests" / "eval_uv.json").string()}).code == 0);
  CHECK(slurp(dir / "reports" / "uv_pr.csv") == before);
  CHECK(run({"replay", "--manifest", (dir / "nope.json").string()}).code == cli::kExitRuntime);
}

TEST_CASE("exactly realized model evaluates to AP 1") {
  const fs::path dir = fresh_dir("exact");
  const Theorem1Instance inst = theorem1_instance(3);
  TrainedModel m;
  m.variant = Variant::kUV;
  m.k = inst.U.k();
  m.theta = inst.theta;
  m.query_codes = inst.U;
  m.database_codes = inst.V;
  save_model(dir / "t1.model", m);
  save_similarity(dir / "t1.abhs", inst.S);
  const Result r = run({"eval", "--model", (dir / "t1.model").string(), "--sim", (dir / "t1.abhs").string(), "--out",
                        dir.string()});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "ap") == "1.000000");
}

TEST_CASE("symmetric training on the theorem-1 matrix stays inexact") {
  const fs::path dir = fresh_dir("t1sym");
  save_similarity(dir / "s.abhs", theorem1_instance(4).S);
  const Result r =
      run({"train", "--variant", "sym", "--k", "6", "--sim", (dir / "s.abhs").string(), "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(value_of(r.out, "exact") == "no");
  CHECK(std::stod(value_of(r.out, "pair_accuracy")) < 1.0);
}

TEST_CASE("theorem1 summary table") {
  const Result r = run({"theorem1", "--r", "2", "5", "--seeds", "3"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header, row2, row5;
  std::getline(in, header);
  std::getline(in, row2);
  std::getline(in, row5);
  CHECK(header == "r,n,2r,n/2,asym_exact,min_margin,sym_k,best_sym_accuracy");
  CHECK(row2.rfind("2,4,4,2,yes,1,4,", 0) == 0);
  CHECK(row5.rfind("5,32,10,16,yes,1,10,", 0) == 0);
  CHECK(std::stod(row5.substr(row5.rfind(',') + 1)) < 1.0);
  CHECK(run({"theorem1", "--r", "5", "--seeds", "3"}).out == run({"theorem1", "--r", "5", "--seeds", "3"}).out);
  CHECK(run({"theorem1", "--r", "13"}).code == cli::kExitUsage);
}

TEST_CASE("best threshold accuracy") {
  const Theorem1Instance inst = theorem1_instance(3);
  CHECK(cli::best_threshold_accuracy(inst.U, inst.V, inst.S) == 1.0);
  // All-identical codes: one product value, so the best threshold labels
  // every pair with the majority sign.
  const auto P = PackedCodeMatrix::from_signs(SignMatrix(2, 8, 1));
  const double majority = std::max(inst.S.positive_count(), 64 - inst.S.positive_count()) / 64.0;
  CHECK(cli::best_threshold_accuracy(P, P, inst.S) == majority);
}

TEST_CASE("retrieve prints id and distance lines") {
  const fs::path dir = fresh_dir("retrieve");
  const std::string out = dir.string();
  REQUIRE(run({"gen", "--n", "80", "--train-n", "40", "--positive-frac", "0.3", "--out", out}).code == 0);
  const std::string train = (dir / "data" / "train.abhx").string();
  REQUIRE(run({"train", "--variant", "lsh", "--k", "12", "--data", train, "--sim", (dir / "data" / "sim_train.abhs").string(),
               "--out", out})
              .code == 0);
  const std::string codes = (dir / "models" / "lsh_db.abhc").string();
  const std::string model = (dir / "models" / "lsh.model").string();
  const Result r = run({"retrieve", "--db-codes", codes, "--model", model, "--query-file", train, "--top", "3"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::size_t q, dist;
  std::string id;
  std::size_t lines = 0;
  while (in >> q >> id >> dist) {
    if (lines % 3 == 0) {
      // Each training point is its own database entry, so the first hit is at distance 0.
      CHECK(dist == 0);
    }
    ++lines;
  }
  CHECK(lines == 40 * 3);

  const PackedCodeMatrix wrong(5, 2);
  save_codes(dir / "wrong.abhc", wrong);
  CHECK(run({"retrieve", "--db-codes", codes, "--query-codes", (dir / "wrong.abhc").string()}).code ==
        cli::kExitUsage);
  CHECK(run({"retrieve", "--db-codes", (dir / "missing.abhc").string(), "--query-codes", codes}).code ==
        cli::kExitRuntime);
}

TEST_CASE("bits table") {
  const fs::path dir = fresh_dir("bits");
  save_similarity(dir / "s.abhs", theorem1_instance(3).S);
  const Result r = run({"bits", "--sim", (dir / "s.abhs").string(), "--k", "6", "--targets", "0.6", "0.99", "--out",
                        dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "csv" / "bits.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"ap_target", "k_sym", "k_asym"});
  CHECK(rows[2][2] != "NA");
  CHECK(read_csv(dir / "csv" / "ap_by_k.csv").size() == 7);
  CHECK(run({"bits", "--sim", (dir / "s.abhs").string(), "--targets", "1.5", "--out", dir.string()}).code ==
        cli::kExitUsage);
}

TEST_CASE("seeded toy run matches the golden CSVs") {
  const fs::path dir = fresh_dir("golden");
  const std::string out = dir.string();
  REQUIRE(run({"gen", "--n", "60", "--train-n", "30", "--positive-frac", "0.3", "--seed", "7", "--out", out}).code == 0);
  const std::string sim = (dir / "data" / "sim_train.abhs").string();
  REQUIRE(run({"train", "--variant", "uv", "--k", "4", "--seed", "7", "--sim", sim, "--out", out}).code == 0);
  REQUIRE(run({"eval", "--model", (dir / "models" / "uv.model").string(), "--sim", sim, "--out", out}).code == 0);
  const fs::path golden = ASYMHASH_GOLDEN_DIR;
  CHECK(slurp(dir / "reports" / "uv_ap.csv") == slurp(golden / "toy_uv_ap.csv"));
  CHECK(slurp(dir / "reports" / "uv_pr.csv") == slurp(golden / "toy_uv_pr.csv"));
}
