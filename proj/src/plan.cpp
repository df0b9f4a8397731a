#include "scc/plan.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "scc/error.hpp"
#include "scc/format.hpp"

namespace scc {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

Support cyclic_support(int start, int weight, int modulus) {
  Support t;
  t.reserve(static_cast<std::size_t>(weight));
  for (int j = 0; j < weight; ++j) t.push_back((start + j) % modulus);
  return t;
}

Support full_support(int k) {
  Support t(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) t[static_cast<std::size_t>(j)] = j;
  return t;
}

void validate_supports(const std::vector<Support>& supports, const DenseMatrix& coeffs, int n, int k,
                       int weight, const char* name) {
  require(static_cast<int>(supports.size()) == n, ErrorCode::InconsistentParams,
          std::string(name) + ": need one support per worker");
  require(coeffs.rows() == n && coeffs.cols() == k, ErrorCode::InconsistentParams,
          std::string(name) + ": coefficient matrix must be n x k");
  for (int i = 0; i < n; ++i) {
    const auto& t = supports[static_cast<std::size_t>(i)];
    require(static_cast<int>(t.size()) == weight, ErrorCode::InconsistentParams,
            std::string(name) + ": worker " + std::to_string(i) + " support size differs from weight");
    std::set<int> seen;
    for (int q : t) {
      require(q >= 0 && q < k && seen.insert(q).second, ErrorCode::InconsistentParams,
              std::string(name) + ": worker " + std::to_string(i) + " support has a bad index");
    }
    for (int q = 0; q < k; ++q) {
      const bool in_support = seen.count(q) != 0;
      require(in_support == (coeffs(i, q) != 0.0), ErrorCode::InconsistentParams,
              std::string(name) + ": worker " + std::to_string(i) +
                  " coefficients must be nonzero exactly on the support");
    }
  }
}

}  // namespace

std::string_view to_string(PlanKind kind) { return kind == PlanKind::matvec ? "matvec" : "matmat"; }

PlanKind parse_plan_kind(std::string_view text) {
  if (text == "matvec") return PlanKind::matvec;
  if (text == "matmat") return PlanKind::matmat;
  throw Error(ErrorCode::InconsistentParams, "unknown plan kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Distribution
// ---------------------------------------------------------------------------

Distribution Distribution::normal(double mean, double stddev) {
  require(stddev > 0.0, ErrorCode::InvalidDistribution, "normal stddev must be positive");
  return {Family::normal, mean, stddev};
}

Distribution Distribution::uniform(double lower, double upper) {
  require(lower < upper, ErrorCode::InvalidDistribution, "uniform needs lower < upper");
  return {Family::uniform, lower, upper};
}

Distribution Distribution::parse(std::string_view text) {
  auto open = text.find('(');
  auto comma = text.find(',');
  auto close = text.find(')');
  if (open == std::string_view::npos || comma == std::string_view::npos || close == std::string_view::npos ||
      !(open < comma && comma < close)) {
    throw Error(ErrorCode::InvalidDistribution, "expected name(a,b), got '" + std::string(text) + "'");
  }
  std::string name(text.substr(0, open));
  std::string a(text.substr(open + 1, comma - open - 1));
  std::string b(text.substr(comma + 1, close - comma - 1));
  char* end = nullptr;
  double x = std::strtod(a.c_str(), &end);
  bool ok = end != a.c_str();
  double y = std::strtod(b.c_str(), &end);
  ok = ok && end != b.c_str();
  if (!ok) throw Error(ErrorCode::InvalidDistribution, "bad parameters in '" + std::string(text) + "'");
  if (name == "normal" || name == "rand") return normal(x, y);
  if (name == "uniform" || name == "unifrand") return uniform(x, y);
  throw Error(ErrorCode::InvalidDistribution, "unknown distribution '" + name + "'");
}

std::string Distribution::to_string() const {
  return std::string(family == Family::normal ? "normal(" : "uniform(") + shortest(first) + "," +
         shortest(second) + ")";
}

double Distribution::sample(std::mt19937_64& rng) const {
  double v = 0.0;
  if (family == Family::normal) {
    std::normal_distribution<double> d(first, second);
    while (v == 0.0) v = d(rng);
  } else {
    std::uniform_real_distribution<double> d(first, second);
    do {
      v = d(rng);
    } while (v == 0.0 || v == first);
  }
  return v;
}

// ---------------------------------------------------------------------------
// EncodingPlan
// ---------------------------------------------------------------------------

EncodingPlan::EncodingPlan(Parts parts) : p_(std::move(parts)) {
  require(p_.k_a >= 1 && p_.k_b >= 1, ErrorCode::InconsistentParams, "k_A and k_B must be >= 1");
  require(p_.s >= 0, ErrorCode::InconsistentParams, "s must be >= 0");
  require(p_.n == p_.k_a * p_.k_b + p_.s, ErrorCode::InconsistentParams,
          "n = " + std::to_string(p_.n) + " but recovery threshold + s = " +
              std::to_string(p_.k_a * p_.k_b + p_.s));
  if (p_.kind == PlanKind::matvec) {
    require(p_.k_b == 1 && p_.omega_b == 1, ErrorCode::InconsistentParams, "matvec plans have k_B = omega_B = 1");
  }
  require(p_.omega_a >= 1 && p_.omega_a <= p_.k_a && p_.omega_b >= 1 && p_.omega_b <= p_.k_b,
          ErrorCode::InconsistentParams, "weights must lie in [1, k]");
  validate_supports(p_.supports_a, p_.coeffs.a, p_.n, p_.k_a, p_.omega_a, "A");
  validate_supports(p_.supports_b, p_.coeffs.b, p_.n, p_.k_b, p_.omega_b, "B");
}

EncodingPlan EncodingPlan::with_coefficients(CoefficientSet coeffs) const {
  Parts parts = p_;
  parts.coeffs = std::move(coeffs);
  return EncodingPlan(std::move(parts));
}

EncodingPlan EncodingPlan::with_coefficients(CoefficientSet coeffs, std::uint64_t seed,
                                             const Distribution& dist) const {
  Parts parts = p_;
  parts.coeffs = std::move(coeffs);
  parts.seed = seed;
  parts.distribution = dist;
  return EncodingPlan(std::move(parts));
}

EncodingPlan EncodingPlan::with_source_widths(index_t cols_a, index_t cols_b) const {
  Parts parts = p_;
  if (p_.kind == PlanKind::matvec) {
    parts.source_cols_a = cols_a;
    parts.source_cols_b = 1;
  } else if (p_.transposed) {
    parts.source_cols_a = cols_b;
    parts.source_cols_b = cols_a;
  } else {
    parts.source_cols_a = cols_a;
    parts.source_cols_b = cols_b;
  }
  return EncodingPlan(std::move(parts));
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

CoefficientSet sample_coefficients(const EncodingPlan& plan, const Distribution& dist, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CoefficientSet c{DenseMatrix(plan.n(), plan.k_a()), DenseMatrix(plan.n(), plan.k_b())};
  for (int i = 0; i < plan.n(); ++i)
    for (int q : plan.supports_a()[static_cast<std::size_t>(i)]) c.a(i, q) = dist.sample(rng);
  for (int i = 0; i < plan.n(); ++i) {
    for (int q : plan.supports_b()[static_cast<std::size_t>(i)]) {
      c.b(i, q) = plan.kind() == PlanKind::matvec ? 1.0 : dist.sample(rng);
    }
  }
  return c;
}

namespace {

// Builds a plan whose coefficients are drawn from the supports just set.
EncodingPlan finish(EncodingPlan::Parts parts) {
  parts.coeffs.a = DenseMatrix(parts.n, parts.k_a);
  parts.coeffs.b = DenseMatrix(parts.n, parts.k_b);
  // Placeholder coefficients (all ones on the support) so the skeleton
  // validates; then replace with real draws.
  for (int i = 0; i < parts.n; ++i) {
    for (int q : parts.supports_a[static_cast<std::size_t>(i)]) parts.coeffs.a(i, q) = 1.0;
    for (int q : parts.supports_b[static_cast<std::size_t>(i)]) parts.coeffs.b(i, q) = 1.0;
  }
  const auto dist = parts.distribution;
  const auto seed = parts.seed;
  EncodingPlan skeleton(std::move(parts));
  return skeleton.with_coefficients(sample_coefficients(skeleton, dist, seed));
}

}  // namespace

EncodingPlan plan_matvec(int n, int k_a, int s, const Distribution& dist, std::uint64_t seed) {
  require(k_a >= 1, ErrorCode::InconsistentParams, "k_A must be >= 1");
  require(s >= 0, ErrorCode::InconsistentParams, "s must be >= 0");
  require(n == k_a + s, ErrorCode::InconsistentParams,
          "matvec needs n = k_A + s, got n=" + std::to_string(n) + ", k_A=" + std::to_string(k_a) +
              ", s=" + std::to_string(s));
  EncodingPlan::Parts p;
  p.kind = PlanKind::matvec;
  p.n = n;
  p.k_a = k_a;
  p.s = s;
  p.omega_a = std::min(s + 1, k_a);
  p.seed = seed;
  p.distribution = dist;
  for (int i = 0; i < n; ++i) {
    p.supports_a.push_back(cyclic_support(i % k_a, p.omega_a, k_a));
    p.supports_b.push_back({0});
  }
  return finish(std::move(p));
}

EncodingPlan plan_matmat(int n, int k_a, int k_b, int s, int omega_a, int omega_b, const Distribution& dist,
                         std::uint64_t seed, WeightCheck check) {
  require(k_a >= 1 && k_b >= 1, ErrorCode::InconsistentParams, "k_A and k_B must be >= 1");
  require(s >= 0, ErrorCode::InconsistentParams, "s must be >= 0");
  require(n == k_a * k_b + s, ErrorCode::InconsistentParams,
          "matmat needs n = k_A k_B + s, got n=" + std::to_string(n) + ", k_A k_B + s=" +
              std::to_string(k_a * k_b + s));
  bool transposed = false;
  if (k_b > k_a) {
    std::swap(k_a, k_b);
    std::swap(omega_a, omega_b);
    transposed = true;
  }
  require(s <= k_a, ErrorCode::InconsistentParams,
          "s = " + std::to_string(s) + " exceeds max(k_A, k_B) = " + std::to_string(k_a));
  if (check == WeightCheck::enforce) {
    auto violated = [](const std::string& what) { throw Error(ErrorCode::WeightConstraintViolated, what); };
    if (!(omega_a * omega_b > s)) {
      violated("omega_A * omega_B > s fails: " + std::to_string(omega_a * omega_b) + " <= " + std::to_string(s));
    }
    if (!(1 < omega_a && omega_a < k_a)) {
      violated("1 < omega_A < k_A fails: omega_A=" + std::to_string(omega_a) + ", k_A=" + std::to_string(k_a));
    }
    if (!(1 < omega_b && omega_b < k_b)) {
      violated("1 < omega_B < k_B fails: omega_B=" + std::to_string(omega_b) + ", k_B=" + std::to_string(k_b));
    }
    if (!(omega_a >= omega_b)) {
      violated("omega_A >= omega_B fails: " + std::to_string(omega_a) + " < " + std::to_string(omega_b));
    }
  } else {
    require(omega_a >= 1 && omega_a <= k_a && omega_b >= 1 && omega_b <= k_b, ErrorCode::InconsistentParams,
            "weights must lie in [1, k]");
  }
  EncodingPlan::Parts p;
  p.kind = PlanKind::matmat;
  p.n = n;
  p.k_a = k_a;
  p.k_b = k_b;
  p.s = s;
  p.omega_a = omega_a;
  p.omega_b = omega_b;
  p.transposed = transposed;
  p.seed = seed;
  p.distribution = dist;
  for (int i = 0; i < n; ++i) {
    p.supports_a.push_back(cyclic_support(i % k_a, omega_a, k_a));
    p.supports_b.push_back(cyclic_support((i / k_a) % k_b, omega_b, k_b));
  }
  return finish(std::move(p));
}

std::pair<int, int> choose_matmat_weights(int k_a, int k_b, int s) {
  if (k_b > k_a) std::swap(k_a, k_b);
  std::pair<int, int> best{0, 0};
  int best_product = 0;
  for (int wb = 2; wb < k_b; ++wb) {
    for (int wa = wb; wa < k_a; ++wa) {
      if (wa * wb <= s) continue;
      if (best_product == 0 || wa * wb < best_product) {
        best = {wa, wb};
        best_product = wa * wb;
      }
      break;
    }
  }
  if (best_product == 0) {
    throw Error(ErrorCode::WeightConstraintViolated,
                "no weights satisfy omega_A omega_B > " + std::to_string(s) + " with 1 < omega < k");
  }
  return best;
}

EncodingPlan plan_dense_baseline(PlanKind kind, int n, int k_a, int k_b, int s, const Distribution& dist,
                                 std::uint64_t seed) {
  if (kind == PlanKind::matvec) k_b = 1;
  require(k_a >= 1 && k_b >= 1, ErrorCode::InconsistentParams, "k_A and k_B must be >= 1");
  require(n == k_a * k_b + s, ErrorCode::InconsistentParams, "n must equal k_A k_B + s");
  EncodingPlan::Parts p;
  p.kind = kind;
  p.scheme = "dense_baseline";
  p.n = n;
  p.k_a = k_a;
  p.k_b = k_b;
  p.s = s;
  p.omega_a = k_a;
  p.omega_b = k_b;
  p.seed = seed;
  p.distribution = dist;
  if (kind == PlanKind::matmat && k_b > k_a) {
    std::swap(p.k_a, p.k_b);
    std::swap(p.omega_a, p.omega_b);
    p.transposed = true;
  }
  for (int i = 0; i < n; ++i) {
    p.supports_a.push_back(full_support(p.k_a));
    p.supports_b.push_back(full_support(p.k_b));
  }
  return finish(std::move(p));
}

std::vector<std::vector<int>> class_structure(const EncodingPlan& plan) {
  require(plan.kind() == PlanKind::matmat, ErrorCode::PlanMismatch, "class structure needs a matmat plan");
  std::vector<std::vector<int>> classes(static_cast<std::size_t>(plan.k_a()));
  for (int j = 0; j < plan.n(); ++j) classes[static_cast<std::size_t>(j % plan.k_a())].push_back(j);
  return classes;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::json rows_to_json(const DenseMatrix& m) {
  auto rows = nlohmann::json::array();
  for (index_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

DenseMatrix rows_from_json(const nlohmann::json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    throw Error(ErrorCode::ParseError, "coefficient matrix must have one row per worker");
  }
  DenseMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw Error(ErrorCode::ParseError, "coefficient row " + std::to_string(r) + " has the wrong length");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

std::string plan_to_json(const EncodingPlan& plan) {
  nlohmann::json j;
  j["format"] = "scc-plan/1";
  j["kind"] = std::string(to_string(plan.kind()));
  j["scheme"] = plan.scheme();
  j["n"] = plan.n();
  j["k_A"] = plan.k_a();
  j["k_B"] = plan.k_b();
  j["s"] = plan.s();
  j["omega_A"] = plan.omega_a();
  j["omega_B"] = plan.omega_b();
  j["transposed"] = plan.transposed();
  j["seed"] = plan.seed();
  j["distribution"] = plan.distribution().to_string();
  j["source_cols_A"] = plan.source_cols_a();
  j["source_cols_B"] = plan.source_cols_b();
  j["supports_A"] = plan.supports_a();
  j["supports_B"] = plan.supports_b();
  j["coeffs_A"] = rows_to_json(plan.coeffs_a());
  j["coeffs_B"] = rows_to_json(plan.coeffs_b());
  return j.dump(2) + "\n";
}

EncodingPlan plan_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("plan: ") + e.what());
  }
  try {
    EncodingPlan::Parts p;
    p.kind = parse_plan_kind(j.at("kind").get<std::string>());
    p.scheme = j.value("scheme", std::string("cyclic"));
    p.n = j.at("n").get<int>();
    p.k_a = j.at("k_A").get<int>();
    p.k_b = j.at("k_B").get<int>();
    p.s = j.at("s").get<int>();
    p.omega_a = j.at("omega_A").get<int>();
    p.omega_b = j.at("omega_B").get<int>();
    p.transposed = j.value("transposed", false);
    p.seed = j.at("seed").get<std::uint64_t>();
    p.distribution = Distribution::parse(j.at("distribution").get<std::string>());
    p.source_cols_a = j.value("source_cols_A", index_t{0});
    p.source_cols_b = j.value("source_cols_B", index_t{0});
    p.supports_a = j.at("supports_A").get<std::vector<Support>>();
    p.supports_b = j.at("supports_B").get<std::vector<Support>>();
    p.coeffs.a = rows_from_json(j.at("coeffs_A"), p.n, p.k_a);
    p.coeffs.b = rows_from_json(j.at("coeffs_B"), p.n, p.k_b);
    return EncodingPlan(std::move(p));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("plan: ") + e.what());
  }
}

void save_plan(const EncodingPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << plan_to_json(plan);
}

EncodingPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return plan_from_json(ss.str());
}

}  // namespace scc
