// scc: command-line front end for sparse cyclic coded computation.
//
// Data goes to files (or stdout when no path is given); progress and
// summaries go to stderr. Exit codes: 0 ok, 1 error, 2 usage,
// 3 not enough survivors, 4 decoding failed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scc/decoder.hpp"
#include "scc/encode.hpp"
#include "scc/error.hpp"
#include "scc/hetero.hpp"
#include "scc/kernels.hpp"
#include "scc/matrix.hpp"
#include "scc/matrix_market.hpp"
#include "scc/plan.hpp"
#include "scc/simulator.hpp"
#include "scc/stability.hpp"
#include "scc/verifier.hpp"

namespace fs = std::filesystem;
using namespace scc;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotEnoughSurvivors = 3;
constexpr int kExitDecodeFailed = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

// Either "-" / empty (stdout) or a file.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

// Accepts coordinate or array Matrix Market for a dense operand.
DenseMatrix read_dense_any(const fs::path& path) {
  const auto text = read_text(path);
  std::istringstream in(text);
  if (text.find("coordinate") != std::string::npos && text.find("coordinate") < text.find('\n')) {
    return read_matrix_market(in).to_dense();
  }
  return read_dense_matrix_market(in);
}

std::string task_name(int worker, int n, char operand) {
  const int width = static_cast<int>(std::to_string(std::max(n - 1, 0)).size());
  std::string id = std::to_string(worker);
  return "task_" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id + "_" + operand + ".mtx";
}

// ---- plan construction shared by encode, kappa and verify ----

struct PlanFlags {
  std::string plan_path;
  std::string kind = "matvec";
  int n = 0;
  int k_a = 0;
  int k_b = 1;
  int s = -1;
  int w_a = 0;
  int w_b = 0;
  std::string dist = "normal(0,1)";
  std::uint64_t seed = 0;
  std::string profile;
  int k_bar = 0;
  bool dense_baseline = false;
};

void add_plan_flags(CLI::App* cmd, PlanFlags& f, bool allow_file) {
  if (allow_file) cmd->add_option("--plan", f.plan_path, "Saved plan.json (overrides the parameter flags)");
  cmd->add_option("--kind", f.kind, "matvec or matmat")->check(CLI::IsMember({"matvec", "matmat"}));
  cmd->add_option("--n", f.n, "Workers (default k_A k_B + s)");
  cmd->add_option("--kA", f.k_a, "Block-columns of A");
  cmd->add_option("--kB", f.k_b, "Block-columns of B (matmat)");
  cmd->add_option("--s", f.s, "Stragglers tolerated");
  cmd->add_option("--wA", f.w_a, "omega_A (matmat; default: smallest valid product)");
  cmd->add_option("--wB", f.w_b, "omega_B (matmat)");
  cmd->add_option("--dist", f.dist, "Coefficient distribution, e.g. normal(0,1) or uniform(-1,1)");
  cmd->add_option("--seed", f.seed, "Coefficient seed");
  cmd->add_option("--profile", f.profile, "Heterogeneous profile JSON; builds the virtual system")
      ->check(CLI::ExistingFile);
  cmd->add_option("--kbar", f.k_bar, "Boundary index into the sorted profile");
  cmd->add_flag("--dense-baseline", f.dense_baseline, "Full-support random code instead of the cyclic scheme");
}

EncodingPlan build_plan(PlanFlags& f) {
  if (!f.plan_path.empty()) return load_plan(f.plan_path);
  const PlanKind kind = parse_plan_kind(f.kind);
  const auto dist = Distribution::parse(f.dist);
  if (!f.profile.empty()) {
    const auto mapping = virtualize(load_profile(f.profile), f.k_bar, kind);
    f.n = mapping.n_virtual;
    f.s = mapping.s;
    if (kind == PlanKind::matvec) {
      f.k_a = mapping.k;
      f.k_b = 1;
    } else if (f.k_a * f.k_b != mapping.k) {
      throw UsageError("--kA * --kB must equal the profile's k = " + std::to_string(mapping.k));
    }
  }
  if (kind == PlanKind::matvec) f.k_b = 1;
  if (f.k_a < 1 || f.s < 0) throw UsageError("need --plan, or --kA and --s");
  if (f.n == 0) f.n = f.k_a * f.k_b + f.s;
  if (f.dense_baseline) return plan_dense_baseline(kind, f.n, f.k_a, f.k_b, f.s, dist, f.seed);
  if (kind == PlanKind::matvec) return plan_matvec(f.n, f.k_a, f.s, dist, f.seed);
  if (f.w_a == 0 || f.w_b == 0) std::tie(f.w_a, f.w_b) = choose_matmat_weights(f.k_a, f.k_b, f.s);
  return plan_matmat(f.n, f.k_a, f.k_b, f.s, f.w_a, f.w_b, dist, f.seed);
}

// ---- gen ----

struct GenFlags {
  index_t rows = 0;
  index_t cols = 0;
  double density = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenFlags& f) {
  const auto a = generate_random_sparse(f.rows, f.cols, f.density, f.seed);
  write_matrix_market(a, fs::path(f.out));
  std::cerr << "gen: " << f.rows << "x" << f.cols << ", nnz " << a.nnz() << " -> " << f.out << "\n";
  return 0;
}

// ---- encode ----

struct EncodeFlags {
  PlanFlags plan;
  std::string a;
  std::string b;
  std::string x;
  std::string outdir;
};

int cmd_encode(EncodeFlags& f) {
  if (f.b.empty() == f.x.empty()) throw UsageError("give exactly one of --B or --x");
  if (!f.b.empty()) f.plan.kind = "matmat";
  if (!f.x.empty()) f.plan.kind = "matvec";
  auto plan = build_plan(f.plan);
  const fs::path out(f.outdir);
  fs::create_directories(out);
  const auto a = read_matrix_market(fs::path(f.a));

  nlohmann::ordered_json sources;
  sources["format"] = "scc-sources/1";
  sources["A"] = fs::absolute(f.a).lexically_normal().string();
  std::vector<WorkerTask> tasks;
  if (plan.kind() == PlanKind::matvec) {
    const auto x = read_dense_any(f.x);
    plan = plan.with_source_widths(a.cols(), 1);
    tasks = encode_tasks(pad_columns(a, plan.k_a()), x, plan);
    write_dense_matrix_market(x, out / "x.mtx");
    sources["x"] = fs::absolute(f.x).lexically_normal().string();
  } else {
    const auto b = read_matrix_market(fs::path(f.b));
    plan = plan.with_source_widths(a.cols(), b.cols());
    const index_t ka = plan.transposed() ? plan.k_b() : plan.k_a();
    const index_t kb = plan.transposed() ? plan.k_a() : plan.k_b();
    tasks = encode_tasks(pad_columns(a, ka), pad_columns(b, kb), plan);
    sources["B"] = fs::absolute(f.b).lexically_normal().string();
  }
  if (!f.plan.profile.empty()) {
    write_text(out / "profile.json", profile_to_json(load_profile(f.plan.profile)));
    sources["profile"] = "profile.json";
    sources["k_bar"] = f.plan.k_bar;
  }
  save_plan(plan, out / "plan.json");
  for (const auto& t : tasks) {
    write_matrix_market(t.encoded_a, out / task_name(t.worker_id, plan.n(), 'A'));
    if (t.encoded_b) write_matrix_market(*t.encoded_b, out / task_name(t.worker_id, plan.n(), 'B'));
  }
  write_text(out / "sources.json", sources.dump(2) + "\n");
  std::cerr << "encode: " << tasks.size() << " tasks, omega_A=" << plan.omega_a() << ", omega_B=" << plan.omega_b()
            << ", transmitted nnz " << communication_cost(tasks).total << " -> " << f.outdir << "\n";
  return 0;
}

// ---- simulate ----

struct SimulateFlags {
  std::string plan_dir;
  std::vector<int> fail;
  std::vector<int> late;
  std::vector<int> slow;
  double slow_factor = 2.0;
  std::string delay = "shifted_exponential";
  double base_rate = 1e-9;
  double shift = 0.0;
  double exp_mean = -1.0;
  std::uint64_t delay_seed = 0;
  bool oracle = false;
  std::string report;
};

int cmd_simulate(const SimulateFlags& f) {
  const fs::path dir(f.plan_dir);
  const auto plan = load_plan(dir / "plan.json");
  const auto sources = nlohmann::json::parse(read_text(dir / "sources.json"));

  std::vector<WorkerTask> tasks(static_cast<std::size_t>(plan.n()));
  std::shared_ptr<const DenseMatrix> x;
  if (plan.kind() == PlanKind::matvec) x = std::make_shared<const DenseMatrix>(read_dense_matrix_market(dir / "x.mtx"));
  for (int i = 0; i < plan.n(); ++i) {
    auto& t = tasks[static_cast<std::size_t>(i)];
    t.worker_id = i;
    t.encoded_a = read_matrix_market(dir / task_name(i, plan.n(), 'A'));
    if (plan.kind() == PlanKind::matmat) {
      t.encoded_b = read_matrix_market(dir / task_name(i, plan.n(), 'B'));
    } else {
      t.vector_x = x;
    }
  }

  DelayModel delay;
  delay.kind = f.delay == "deterministic" ? DelayModel::Kind::deterministic : DelayModel::Kind::shifted_exponential;
  delay.base_rate = f.base_rate;
  delay.shift = f.shift;
  if (f.exp_mean >= 0) delay.exp_mean = f.exp_mean;
  delay.seed = f.delay_seed;

  std::vector<StragglerSpec> stragglers;
  if (!f.fail.empty()) stragglers.push_back(StragglerSpec::failure(f.fail));
  if (!f.late.empty()) stragglers.push_back(StragglerSpec::explicit_set(f.late));
  if (!f.slow.empty()) stragglers.push_back(StragglerSpec::slowdown(f.slow, f.slow_factor));

  std::optional<DenseMatrix> oracle;
  if (f.oracle) {
    const auto a = read_matrix_market(fs::path(sources.at("A").get<std::string>()));
    if (plan.kind() == PlanKind::matvec) {
      oracle = spmv_transpose(a, read_dense_any(sources.at("x").get<std::string>()));
    } else {
      oracle = spgemm_transpose(a, read_matrix_market(fs::path(sources.at("B").get<std::string>()))).value;
    }
  }

  SimulationReport report;
  if (sources.contains("profile")) {
    const auto mapping =
        virtualize(load_profile(dir / sources["profile"].get<std::string>()), sources.at("k_bar").get<int>(), plan.kind());
    report = simulate(group_tasks(std::move(tasks), mapping), mapping, plan, delay, stragglers, oracle);
  } else {
    report = simulate(tasks, plan, delay, stragglers, oracle);
  }

  if (f.report.empty()) {
    std::cout << simulation_report_json(report);
  } else {
    write_text(f.report + ".json", simulation_report_json(report));
    write_text(f.report + ".csv", simulation_report_csv(report));
  }
  std::cerr << "simulate: decode " << (report.decode_ok ? "ok" : "FAILED");
  if (report.relative_error) std::cerr << ", relative error " << *report.relative_error;
  std::cerr << ", survivors " << report.survivor_set.size() << "\n";
  return report.decode_ok ? 0 : kExitDecodeFailed;
}

// ---- kappa ----

struct KappaFlags {
  PlanFlags plan;
  int trials = 1;
  std::string dist;
  std::uint64_t base_seed = 0;
  bool base_seed_set = false;
  std::uint64_t budget = 1'000'000;
  std::uint64_t estimate = 0;
  std::string json_out;
  std::string csv_out;
  bool append = false;
  bool timing = false;
  std::string method;
  std::string save_plan;
};

int cmd_kappa(KappaFlags& f) {
  const auto plan = build_plan(f.plan);
  const auto dist = f.dist.empty() ? plan.distribution() : Distribution::parse(f.dist);
  const std::uint64_t seed = f.base_seed_set ? f.base_seed : plan.seed();
  KappaOptions options;
  options.budget = f.budget;

  EncodingPlan best = plan;
  KappaReport report;
  if (f.estimate > 0) {
    report = kappa_estimate(plan, f.estimate, seed);
  } else {
    auto result = coefficient_search(plan, f.trials, dist, seed, options);
    best = std::move(result.plan);
    report = std::move(result.report);
  }
  emit(f.json_out, kappa_report_json(report, f.timing));
  if (!f.csv_out.empty()) {
    const std::string label = f.method.empty() ? best.scheme() : f.method;
    const bool fresh = !f.append || !fs::exists(f.csv_out);
    const std::string row = kappa_csv_row(label, best, report);
    if (fresh) {
      write_text(f.csv_out, kappa_csv_header() + row);
    } else {
      std::ofstream(f.csv_out, std::ios::app | std::ios::binary) << row;
    }
  }
  if (!f.save_plan.empty()) save_plan(best, f.save_plan);
  std::cerr << "kappa: worst " << report.kappa_worst << " over " << report.subsets_evaluated << " subsets"
            << (report.estimate ? " (estimate)" : "") << ", " << report.wall_time << " s\n";
  return 0;
}

// ---- verify ----

struct VerifyFlags {
  PlanFlags plan;
  std::string mode;
  std::uint64_t budget = 1'000'000;
  std::uint64_t trials = 1000;
  std::uint64_t samples = 10'000;
  std::uint64_t audit_seed = 0;
  std::string out;
};

int cmd_verify(VerifyFlags& f) {
  const auto plan = build_plan(f.plan);
  if (f.mode == "rank" || f.mode == "matching") {
    AuditOptions options;
    options.budget = f.budget;
    options.keep_rows = true;
    const auto audit = exhaustive_rank_audit(plan, options);
    emit(f.out, audit_csv(audit));
    const auto failed = f.mode == "rank" ? audit.failures : audit.matching_failures;
    std::cerr << "verify " << f.mode << ": " << audit.subsets_tested - failed << "/" << audit.subsets_tested
              << " pass\n";
  } else if (f.mode == "lemma1") {
    const auto audit = lemma1_audit(plan, 100'000, f.samples, f.audit_seed);
    emit(f.out, lemma1_csv(audit));
    std::cerr << "verify lemma1: " << audit.subsets << " subsets, " << audit.violations() << " violations\n";
  } else {
    const auto a = matching_rank_agreement(plan, f.trials, f.audit_seed);
    std::ostringstream csv;
    csv << "trials,agree,matching_without_rank,rank_without_matching,rate\n"
        << a.trials << ',' << a.agree << ',' << a.matching_without_rank << ',' << a.rank_without_matching << ','
        << a.rate << '\n';
    emit(f.out, csv.str());
    std::cerr << "verify agreement: " << a.agree << "/" << a.trials << "\n";
  }
  return 0;
}

// ---- bench ----

struct BenchFlags {
  std::string config;
  std::string csv_out;
  std::string json_out;
};

DelayModel delay_from_json(const nlohmann::json& j) {
  DelayModel d;
  if (j.is_null()) return d;
  const auto kind = j.value("kind", std::string("shifted_exponential"));
  if (kind != "deterministic" && kind != "shifted_exponential") {
    throw Error(ErrorCode::ParseError, "delay.kind must be deterministic or shifted_exponential");
  }
  d.kind = kind == "deterministic" ? DelayModel::Kind::deterministic : DelayModel::Kind::shifted_exponential;
  d.base_rate = j.value("base_rate", d.base_rate);
  d.shift = j.value("shift", d.shift);
  if (j.contains("exp_mean")) d.exp_mean = j["exp_mean"].get<double>();
  d.seed = j.value("seed", d.seed);
  return d;
}

std::vector<StragglerSpec> stragglers_from_json(const nlohmann::json& j) {
  std::vector<StragglerSpec> out;
  if (j.is_null()) return out;
  for (const auto& s : j) {
    const auto mode = s.at("mode").get<std::string>();
    auto targets = s.at("targets").get<std::vector<int>>();
    if (mode == "failure") {
      out.push_back(StragglerSpec::failure(std::move(targets)));
    } else if (mode == "explicit_set") {
      out.push_back(StragglerSpec::explicit_set(std::move(targets)));
    } else if (mode == "slowdown_factor") {
      out.push_back(StragglerSpec::slowdown(std::move(targets), s.at("factor").get<double>()));
    } else {
      throw Error(ErrorCode::ParseError, "unknown straggler mode " + mode);
    }
  }
  return out;
}

int cmd_bench(const BenchFlags& f) {
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_text(f.config));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  try {
    SchemeParams params;
    params.kind = parse_plan_kind(cfg.value("kind", std::string("matmat")));
    params.k_a = cfg.at("k_A").get<int>();
    params.k_b = params.kind == PlanKind::matvec ? 1 : cfg.at("k_B").get<int>();
    params.s = cfg.at("s").get<int>();
    params.n = cfg.value("n", params.k_a * params.k_b + params.s);
    params.omega_a = cfg.value("omega_A", 0);
    params.omega_b = cfg.value("omega_B", 0);
    params.distribution = Distribution::parse(cfg.value("distribution", std::string("normal(0,1)")));
    params.seed = cfg.value("seed", std::uint64_t{0});

    const auto rows = cfg.at("rows").get<index_t>();
    const auto cols_a = cfg.at("cols_A").get<index_t>();
    const auto cols_b = params.kind == PlanKind::matvec ? index_t{1} : cfg.at("cols_B").get<index_t>();
    const auto densities = cfg.at("densities").get<std::vector<double>>();
    const auto matrix_seed = cfg.value("matrix_seed", std::uint64_t{1});

    CompareOptions options;
    options.repetitions = cfg.value("repetitions", 1);
    options.with_kappa = cfg.value("with_kappa", false);
    options.kappa_budget = cfg.value("kappa_budget", options.kappa_budget);
    options.stragglers = stragglers_from_json(cfg.value("stragglers", nlohmann::json()));
    const auto delay = delay_from_json(cfg.value("delay", nlohmann::json()));

    std::string csv = comparison_csv_header();
    auto tables = nlohmann::ordered_json::array();
    for (double eta : densities) {
      const auto a = generate_random_sparse(rows, cols_a, eta, matrix_seed);
      const auto b = params.kind == PlanKind::matvec ? generate_random_sparse(rows, 1, 1.0, matrix_seed + 1)
                                                     : generate_random_sparse(rows, cols_b, eta, matrix_seed + 1);
      const auto table = compare_schemes(a, b, params, delay, options);
      csv += comparison_csv_rows(table, eta);
      auto j = nlohmann::ordered_json::parse(comparison_json(table));
      j["density"] = eta;
      tables.push_back(j);
      std::cerr << "bench: density " << eta << ", flops ratio " << table.flops_ratio << ", communication ratio "
                << table.communication_ratio << "\n";
    }
    emit(f.csv_out, csv);
    if (!f.json_out.empty()) write_text(f.json_out, tables.dump(2) + "\n");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotEnoughSurvivors: return kExitNotEnoughSurvivors;
    case ErrorCode::SingularSystem:
    case ErrorCode::RankDeficient: return kExitDecodeFailed;
    default: return kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse cyclic coded matrix computations: generate, encode, simulate, audit"};
  app.require_subcommand(1);
  int threads = 0;
  if (const char* env = std::getenv("SCC_THREADS")) threads = std::atoi(env);
  app.add_option("--threads", threads, "Cap on worker threads (default: SCC_THREADS or all cores)");

  GenFlags gen;
  auto* g = app.add_subcommand("gen", "Write a random sparse matrix in Matrix Market format");
  g->add_option("--rows", gen.rows, "Rows")->required();
  g->add_option("--cols", gen.cols, "Columns")->required();
  g->add_option("--density", gen.density, "Probability an entry is nonzero")->required();
  g->add_option("--seed", gen.seed, "Generator seed");
  g->add_option("--out", gen.out, "Output .mtx")->required();

  EncodeFlags enc;
  auto* e = app.add_subcommand("encode", "Build a plan and write every worker's encoded blocks");
  add_plan_flags(e, enc.plan, false);
  e->add_option("--A", enc.a, "Matrix A (.mtx)")->required()->check(CLI::ExistingFile);
  e->add_option("--B", enc.b, "Matrix B (.mtx) for A^T B")->check(CLI::ExistingFile);
  e->add_option("--x", enc.x, "Vector x (.mtx) for A^T x")->check(CLI::ExistingFile);
  e->add_option("--outdir", enc.outdir, "Output directory")->required();

  SimulateFlags sim;
  auto* s = app.add_subcommand("simulate", "Run an encoded plan on the simulated cluster and decode");
  s->add_option("--plan-dir", sim.plan_dir, "Directory written by encode")->required()->check(CLI::ExistingDirectory);
  s->add_option("--fail", sim.fail, "Workers that never return")->delimiter(',');
  s->add_option("--late", sim.late, "Workers that finish after all others")->delimiter(',');
  s->add_option("--slow", sim.slow, "Workers slowed by --slow-factor")->delimiter(',');
  s->add_option("--slow-factor", sim.slow_factor, "Slowdown multiplier (>= 1)");
  s->add_option("--delay", sim.delay, "Delay model")->check(CLI::IsMember({"deterministic", "shifted_exponential"}));
  s->add_option("--base-rate", sim.base_rate, "Seconds per multiply-accumulate");
  s->add_option("--shift", sim.shift, "Fixed seconds per task");
  s->add_option("--exp-mean", sim.exp_mean, "Mean of the exponential noise (default: 10% of the task time)");
  s->add_option("--delay-seed", sim.delay_seed, "Noise seed");
  s->add_flag("--oracle", sim.oracle, "Compare against the dense product of the source matrices");
  s->add_option("--report", sim.report, "Write <prefix>.json and <prefix>.csv (default: JSON on stdout)");

  KappaFlags kap;
  auto* k = app.add_subcommand("kappa", "Worst-case condition number and best-of-T coefficient search");
  add_plan_flags(k, kap.plan, true);
  k->add_option("--trials", kap.trials, "Coefficient draws; seeds are base, base+1, ...")
      ->check(CLI::PositiveNumber);
  k->add_option("--trial-dist", kap.dist, "Distribution for the draws (default: the plan's)");
  k->add_option_function<std::uint64_t>(
      "--base-seed", [&](std::uint64_t v) { kap.base_seed = v, kap.base_seed_set = true; },
      "First trial seed (default: the plan's seed)");
  k->add_option("--budget", kap.budget, "Largest C(n, s) enumerated");
  k->add_option("--estimate", kap.estimate, "Sample this many straggler sets instead of enumerating");
  k->add_option("--json", kap.json_out, "KappaReport JSON (default stdout)");
  k->add_option("--csv", kap.csv_out, "Results table");
  k->add_flag("--append", kap.append, "Append to an existing --csv instead of rewriting it");
  k->add_flag("--timing", kap.timing, "Include wall time in the JSON");
  k->add_option("--method", kap.method, "Method label for the CSV row");
  k->add_option("--save-plan", kap.save_plan, "Write the winning plan");

  VerifyFlags ver;
  auto* v = app.add_subcommand("verify", "Combinatorial and numeric decodability audits");
  add_plan_flags(v, ver.plan, true);
  v->add_option("--mode", ver.mode, "Audit to run")
      ->required()
      ->check(CLI::IsMember({"matching", "rank", "lemma1", "agreement"}));
  v->add_option("--budget", ver.budget, "Largest C(n, s) enumerated");
  v->add_option("--trials", ver.trials, "Random subsets for agreement mode");
  v->add_option("--samples", ver.samples, "Random subsets per size for lemma1 when enumeration is too large");
  v->add_option("--audit-seed", ver.audit_seed, "Seed for random subsets");
  v->add_option("--out", ver.out, "Audit CSV (default stdout)");

  BenchFlags ben;
  auto* b = app.add_subcommand("bench", "Proposed vs dense baseline over a sparsity grid");
  b->add_option("--config", ben.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  b->add_option("--out", ben.csv_out, "Comparison CSV (default stdout)");
  b->add_option("--json", ben.json_out, "Comparison JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (threads > 0) kernels::set_num_threads(threads);
    if (g->parsed()) return cmd_gen(gen);
    if (e->parsed()) return cmd_encode(enc);
    if (s->parsed()) return cmd_simulate(sim);
    if (k->parsed()) return cmd_kappa(kap);
    if (v->parsed()) return cmd_verify(ver);
    if (b->parsed()) return cmd_bench(ben);
  } catch (const UsageError& err) {
    std::cerr << "usage: " << err.what() << "\n";
    return kExitUsage;
  } catch (const Error& err) {
    std::cerr << err.what() << "\n";
    return exit_code_for(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
