#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("scc_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && '" SCC_CLI_PATH "' " + args + " >'" + out.string() +
                            "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  void gen(const std::string& name, int rows, int cols, double density, int seed) {
    ASSERT_EQ(run("gen --rows " + std::to_string(rows) + " --cols " + std::to_string(cols) + " --density " +
                  std::to_string(density) + " --seed " + std::to_string(seed) + " --out " + name)
                  .code,
              0);
  }

  int count_tasks(const std::string& sub) {
    int n = 0;
    for (const auto& e : fs::directory_iterator(dir_ / sub))
      if (e.path().filename().string().rfind("task_", 0) == 0) ++n;
    return n;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenWritesMatrixMarket) {
  gen("a.mtx", 40, 10, 0.2, 3);
  const auto text = slurp(dir_ / "a.mtx");
  EXPECT_EQ(text.rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
}

TEST_F(Cli, GenMissingFlagIsUsageError) {
  auto r = run("gen --rows 4 --cols 4 --out a.mtx");
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(dir_ / "a.mtx"));
}

TEST_F(Cli, GenBadDensity) {
  auto r = run("gen --rows 4 --cols 4 --density 1.5 --out a.mtx");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("InvalidDensity"), std::string::npos) << r.err;
}

TEST_F(Cli, EncodeTwelveWorker) {
  gen("a.mtx", 60, 20, 0.1, 1);
  gen("x.mtx", 60, 1, 1.0, 2);
  auto r = run("encode --A a.mtx --x x.mtx --n 12 --kA 10 --s 2 --outdir enc");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_tasks("enc"), 12);
  auto plan = nlohmann::json::parse(slurp(dir_ / "enc" / "plan.json"));
  EXPECT_EQ(plan["omega_A"].get<int>(), 3);
}

TEST_F(Cli, EncodeTwentySevenWorker) {
  gen("a.mtx", 60, 12, 0.1, 1);
  gen("b.mtx", 60, 8, 0.1, 2);
  auto r = run("encode --A a.mtx --B b.mtx --n 27 --kA 6 --kB 4 --s 3 --wA 2 --wB 2 --outdir enc");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_tasks("enc"), 2 * 27);  // an A and a B block per worker
}

TEST_F(Cli, EncodeWeightViolation) {
  gen("a.mtx", 60, 12, 0.1, 1);
  gen("b.mtx", 60, 8, 0.1, 2);
  auto r = run("encode --A a.mtx --B b.mtx --n 28 --kA 6 --kB 4 --s 4 --wA 2 --wB 2 --outdir enc");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("WeightConstraintViolated"), std::string::npos) << r.err;
}

TEST_F(Cli, SimulateDecodesAgainstOracle) {
  gen("a.mtx", 120, 12, 0.1, 1);
  gen("b.mtx", 120, 8, 0.1, 2);
  ASSERT_EQ(run("encode --A a.mtx --B b.mtx --n 27 --kA 6 --kB 4 --s 3 --outdir enc").code, 0);
  auto r = run("simulate --plan-dir enc --fail 3,11,19 --oracle --report rep");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(slurp(dir_ / "rep.json"));
  EXPECT_TRUE(j["decode_ok"].get<bool>());
  EXPECT_LE(j["relative_error"].get<double>(), 1e-8);
  EXPECT_TRUE(fs::exists(dir_ / "rep.csv"));
}

TEST_F(Cli, SimulateTooManyFailures) {
  gen("a.mtx", 60, 10, 0.1, 1);
  gen("x.mtx", 60, 1, 1.0, 2);
  ASSERT_EQ(run("encode --A a.mtx --x x.mtx --n 12 --kA 10 --s 2 --outdir enc").code, 0);
  auto r = run("simulate --plan-dir enc --fail 0,1,2");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("NotEnoughSurvivors"), std::string::npos) << r.err;
}

TEST_F(Cli, SimulateHeterogeneousProfile) {
  std::ofstream(dir_ / "profile.json") << R"({"workers": [{"id": 0, "capacity": 2}, {"id": 1, "capacity": 2}, {"id": 2, "capacity": 1},
    {"id": 3, "capacity": 1}, {"id": 4, "capacity": 1}, {"id": 5, "capacity": 1}, {"id": 6, "capacity": 1}]})";
  gen("a.mtx", 60, 14, 0.2, 1);
  gen("x.mtx", 60, 1, 1.0, 2);
  auto e = run("encode --A a.mtx --x x.mtx --profile profile.json --kbar 5 --outdir enc");
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(count_tasks("enc"), 9);
  auto r = run("simulate --plan-dir enc --fail 6 --slow 0 --slow-factor 1.5 --delay deterministic --shift 1 "
               "--base-rate 0 --oracle");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["decode_ok"].get<bool>());
  EXPECT_EQ(j["survivor_set"].get<std::vector<int>>(), (std::vector<int>{2, 0, 3, 4, 5, 6, 7}));
}

TEST_F(Cli, KappaTwentyTrialsWritesCsv) {
  auto r = run("kappa --kind matvec --n 30 --kA 28 --s 2 --trials 20 --csv k.csv --json k.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir_ / "k.csv");
  EXPECT_EQ(csv.rfind("method,kind,n,k_A,k_B,s,trials,best_seed,subsets_evaluated,kappa_worst\n", 0), 0u);
  EXPECT_NE(csv.find(",matvec,30,28,1,2,20,"), std::string::npos) << csv;
  auto j = nlohmann::json::parse(slurp(dir_ / "k.json"));
  EXPECT_EQ(j["subsets_evaluated"].get<std::uint64_t>(), 20u * 435u);
  EXPECT_EQ(j["trial_kappas"].size(), 20u);
}

TEST_F(Cli, KappaSingleTrialAndBudget) {
  auto one = run("kappa --kind matvec --n 12 --kA 10 --s 2 --trials 1");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(nlohmann::json::parse(one.out)["subsets_evaluated"].get<int>(), 66);
  auto over = run("kappa --kind matvec --n 30 --kA 28 --s 2 --budget 100");
  EXPECT_NE(over.code, 0);
  EXPECT_NE(over.err.find("BudgetExceeded"), std::string::npos) << over.err;
}

TEST_F(Cli, VerifyAudits) {
  auto rank = run("verify --kind matvec --n 12 --kA 10 --s 2 --mode rank");
  ASSERT_EQ(rank.code, 0) << rank.err;
  EXPECT_NE(rank.err.find("66/66 pass"), std::string::npos) << rank.err;
  auto matching = run("verify --kind matmat --n 27 --kA 6 --kB 4 --s 3 --wA 2 --wB 2 --mode matching --out m.csv");
  ASSERT_EQ(matching.code, 0) << matching.err;
  EXPECT_NE(matching.err.find("2925/2925 pass"), std::string::npos) << matching.err;
  auto bad = run("verify --kind matvec --n 12 --kA 10 --s 2 --mode sideways");
  EXPECT_EQ(bad.code, 2);
}

TEST_F(Cli, BenchGrid) {
  std::ofstream(dir_ / "cfg.json") << R"({"kind": "matmat", "n": 27, "k_A": 6, "k_B": 4, "s": 3,
    "omega_A": 2, "omega_B": 2, "rows": 400, "cols_A": 60, "cols_B": 40,
    "densities": [0.05, 0.02, 0.01], "stragglers": [{"mode": "failure", "targets": [0, 5, 9]}]})";
  auto r = run("bench --config cfg.json --json out.json");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int proposed = 0, dense = 0, ratio = 0;
  while (std::getline(lines, line)) {
    proposed += line.rfind("proposed,", 0) == 0;
    dense += line.rfind("dense_baseline,", 0) == 0;
    ratio += line.rfind("ratio_dense_over_proposed,", 0) == 0;
  }
  EXPECT_EQ(proposed, 3);
  EXPECT_EQ(dense, 3);
  EXPECT_EQ(ratio, 3);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "out.json")).size(), 3u);
}

TEST_F(Cli, BenchMissingConfig) { EXPECT_EQ(run("bench --config nope.json").code, 2); }

TEST_F(Cli, RerunsAreByteIdentical) {
  gen("a.mtx", 80, 12, 0.1, 1);
  gen("b.mtx", 80, 8, 0.1, 2);
  const auto first_a = slurp(dir_ / "a.mtx");
  gen("a.mtx", 80, 12, 0.1, 1);
  EXPECT_EQ(slurp(dir_ / "a.mtx"), first_a);

  ASSERT_EQ(run("encode --A a.mtx --B b.mtx --n 27 --kA 6 --kB 4 --s 3 --seed 5 --outdir e1").code, 0);
  ASSERT_EQ(run("encode --A a.mtx --B b.mtx --n 27 --kA 6 --kB 4 --s 3 --seed 5 --outdir e2").code, 0);
  for (const auto& f : fs::directory_iterator(dir_ / "e1")) {
    if (f.path().filename() == "sources.json") continue;  // records absolute paths, same either way
    EXPECT_EQ(slurp(f.path()), slurp(dir_ / "e2" / f.path().filename())) << f.path();
  }
  const std::string sim = "simulate --plan-dir e1 --late 4 --delay-seed 9 --oracle --report ";
  ASSERT_EQ(run(sim + "r1").code, 0);
  ASSERT_EQ(run(sim + "r2").code, 0);
  EXPECT_EQ(slurp(dir_ / "r1.json"), slurp(dir_ / "r2.json"));
  EXPECT_EQ(slurp(dir_ / "r1.csv"), slurp(dir_ / "r2.csv"));

  const std::string kap = "kappa --kind matvec --n 12 --kA 10 --s 2 --trials 3 --seed 4 --csv ";
  EXPECT_EQ(run(kap + "k1.csv").out, run(kap + "k2.csv").out);
  EXPECT_EQ(slurp(dir_ / "k1.csv"), slurp(dir_ / "k2.csv"));
}
