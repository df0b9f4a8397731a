#include "scc/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "scc/decoder.hpp"
#include "scc/error.hpp"
#include "scc/format.hpp"
#include "scc/linalg.hpp"

namespace scc {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t binomial_u64(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(r);
}

// All n effective rows, computed once and sliced per survivor set.
struct RowTable {
  int n = 0;
  int tau = 0;
  DenseMatrix rows;

  explicit RowTable(const EncodingPlan& plan) : n(plan.n()), tau(plan.tau()) {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    rows = stacked_effective_rows(plan, all);
  }

  double kappa_without(const std::vector<int>& stragglers) const {
    DenseMatrix m(tau, tau);
    index_t out = 0;
    std::size_t next = 0;
    for (int w = 0; w < n; ++w) {
      if (next < stragglers.size() && stragglers[next] == w) {
        ++next;
        continue;
      }
      std::copy(rows.row(w).begin(), rows.row(w).end(), m.values().begin() + out * tau);
      ++out;
    }
    return condition_number(m);
  }
};

struct Best {
  double kappa = -1.0;
  std::uint64_t index = kSaturated;

  void offer(double k, std::uint64_t i) {
    if (k > kappa || (k == kappa && i < index)) {
      kappa = k;
      index = i;
    }
  }
};

// Evaluates `count` straggler sets produced by `subset_at`, keeping the max.
template <typename SubsetAt>
Best evaluate(const RowTable& table, std::uint64_t count, SubsetAt subset_at, std::vector<double>* per_subset,
              Execution execution) {
  Best best;
  if (per_subset) per_subset->assign(count, 0.0);
  const auto total = static_cast<std::int64_t>(count);
  if (execution == Execution::serial) {
    for (std::int64_t i = 0; i < total; ++i) {
      const double k = table.kappa_without(subset_at(static_cast<std::uint64_t>(i)));
      if (per_subset) (*per_subset)[static_cast<std::size_t>(i)] = k;
      best.offer(k, static_cast<std::uint64_t>(i));
    }
    return best;
  }
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t i = 0; i < total; ++i) {
      const double k = table.kappa_without(subset_at(static_cast<std::uint64_t>(i)));
      if (per_subset) (*per_subset)[static_cast<std::size_t>(i)] = k;
      local.offer(k, static_cast<std::uint64_t>(i));
    }
#pragma omp critical(scc_kappa_reduce)
    best.offer(local.kappa, local.index);
  }
  return best;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double condition_number(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 1.0;
  const auto sv = singular_values(m);
  const double smax = sv.front();
  const double smin = m.rows() == m.cols() ? sv.back() : 0.0;
  const double tol = smax * static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon();
  if (smax == 0.0 || smin <= tol) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

std::vector<int> unrank_combination(int n, int k, std::uint64_t rank) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  int c = 0;
  for (int i = 0; i < k; ++i) {
    for (;; ++c) {
      const std::uint64_t below = binomial_u64(n - c - 1, k - i - 1);
      if (rank < below) break;
      rank -= below;
    }
    out.push_back(c++);
  }
  return out;
}

KappaReport kappa_worst(const EncodingPlan& plan, const KappaOptions& options) {
  const auto start = Clock::now();
  const std::uint64_t count = binomial_u64(plan.n(), plan.s());
  if (count > options.budget) {
    throw Error(ErrorCode::BudgetExceeded, "C(" + std::to_string(plan.n()) + ", " + std::to_string(plan.s()) +
                                               ") straggler sets exceed the budget of " +
                                               std::to_string(options.budget));
  }
  const RowTable table(plan);
  KappaReport report;
  std::vector<double> per_subset;
  const auto best = evaluate(
      table, count, [&](std::uint64_t r) { return unrank_combination(plan.n(), plan.s(), r); },
      options.keep_per_subset ? &per_subset : nullptr, options.execution);
  report.kappa_worst = best.kappa;
  report.argmax_straggler_set = unrank_combination(plan.n(), plan.s(), best.index);
  report.subsets_evaluated = count;
  if (options.keep_per_subset) report.per_subset_kappas = std::move(per_subset);
  report.best_seed = plan.seed();
  report.trial_seeds = {plan.seed()};
  report.trial_kappas = {report.kappa_worst};
  report.wall_time = seconds_since(start);
  return report;
}

KappaReport kappa_estimate(const EncodingPlan& plan, std::uint64_t samples, std::uint64_t seed, Execution execution) {
  const auto start = Clock::now();
  if (samples == 0) throw Error(ErrorCode::InconsistentParams, "need at least one sample");
  // Draw every set up front so the result does not depend on thread count.
  std::mt19937_64 rng(seed);
  std::vector<int> pool(static_cast<std::size_t>(plan.n()));
  std::vector<std::vector<int>> sets(samples);
  for (auto& set : sets) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < plan.s(); ++i) {
      std::uniform_int_distribution<int> pick(i, plan.n() - 1);
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }
    set.assign(pool.begin(), pool.begin() + plan.s());
    std::sort(set.begin(), set.end());
  }
  const RowTable table(plan);
  const auto best = evaluate(
      table, samples, [&](std::uint64_t i) { return sets[static_cast<std::size_t>(i)]; }, nullptr, execution);
  KappaReport report;
  report.kappa_worst = best.kappa;
  report.argmax_straggler_set = sets[static_cast<std::size_t>(best.index)];
  report.subsets_evaluated = samples;
  report.estimate = true;
  report.best_seed = plan.seed();
  report.trial_seeds = {plan.seed()};
  report.trial_kappas = {report.kappa_worst};
  report.wall_time = seconds_since(start);
  return report;
}

SearchResult coefficient_search(const EncodingPlan& skeleton, int trials, const Distribution& dist,
                                std::uint64_t base_seed, const KappaOptions& options) {
  if (trials < 1) throw Error(ErrorCode::InconsistentParams, "trials must be at least 1");
  const auto start = Clock::now();
  std::optional<SearchResult> best;
  std::vector<std::uint64_t> seeds;
  std::vector<double> kappas;
  std::uint64_t evaluated = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(t);
    auto plan = skeleton.with_coefficients(sample_coefficients(skeleton, dist, seed), seed, dist);
    auto report = kappa_worst(plan, options);
    seeds.push_back(seed);
    kappas.push_back(report.kappa_worst);
    evaluated += report.subsets_evaluated;
    if (!best || report.kappa_worst < best->report.kappa_worst) best = SearchResult{std::move(plan), std::move(report)};
  }
  auto& r = best->report;
  r.trials = trials;
  r.best_seed = best->plan.seed();
  r.trial_seeds = std::move(seeds);
  r.trial_kappas = std::move(kappas);
  r.subsets_evaluated = evaluated;
  r.wall_time = seconds_since(start);
  return std::move(*best);
}

SearchCost competitor_search_cost(int n, int k_a, int k_b, int s) {
  if (n <= 0 || k_a <= 0 || k_b <= 0 || s < 0 || n != k_a * k_b + s) {
    throw Error(ErrorCode::InconsistentParams, "need n = k_A k_B + s with positive block counts");
  }
  SearchCost c;
  const int tau = k_a * k_b;
  c.delta_a = std::lcm(static_cast<std::int64_t>(n), static_cast<std::int64_t>(k_a));
  const double subsets = binomial(n, tau);
  c.proposed = subsets * std::pow(static_cast<double>(tau), 3);
  c.lcm_scheme = subsets * std::pow(static_cast<double>(c.delta_a) * k_b, 3);
  c.ratio = c.lcm_scheme / c.proposed;
  return c;
}

int class_based_min_zeta(int k_b, int s) {
  if (k_b < 1 || s < 0) throw Error(ErrorCode::InconsistentParams, "k_B >= 1 and s >= 0 required");
  const int c = 1 + (s + k_b - 1) / k_b;
  return 1 + k_b - (k_b + c - 1) / c;
}

ComplexityRatio class_based_complexity_ratio(int k_a, int k_b, int s, int omega_a, int omega_b,
                                             std::optional<int> zeta) {
  if (k_a < 1 || k_b < 1 || s < 0 || omega_a < 1 || omega_b < 1) {
    throw Error(ErrorCode::InconsistentParams, "block counts and weights must be positive");
  }
  ComplexityRatio r;
  r.zeta = zeta.value_or(class_based_min_zeta(k_b, s));
  r.numerator = static_cast<std::int64_t>(k_a) * (k_b + s);
  r.denominator = static_cast<std::int64_t>(k_a) * k_b + s;
  const int weight = omega_a * omega_b;
  r.value = static_cast<double>(r.numerator) / static_cast<double>(r.denominator) * r.zeta / weight;
  r.text = std::to_string(r.numerator) + "/" + std::to_string(r.denominator);
  if (r.zeta != weight) r.text += "*" + std::to_string(r.zeta) + "/" + std::to_string(weight);
  return r;
}

std::string kappa_report_json(const KappaReport& report, bool include_timing) {
  nlohmann::ordered_json j;
  // JSON has no infinity; a singular pattern is reported as null.
  if (std::isfinite(report.kappa_worst)) {
    j["kappa_worst"] = report.kappa_worst;
  } else {
    j["kappa_worst"] = nullptr;
  }
  j["argmax_straggler_set"] = report.argmax_straggler_set;
  j["subsets_evaluated"] = report.subsets_evaluated;
  j["estimate"] = report.estimate;
  j["trials"] = report.trials;
  j["best_seed"] = report.best_seed;
  j["trial_seeds"] = report.trial_seeds;
  auto kappas = nlohmann::ordered_json::array();
  for (double k : report.trial_kappas) {
    if (std::isfinite(k)) {
      kappas.push_back(k);
    } else {
      kappas.push_back(nullptr);
    }
  }
  j["trial_kappas"] = kappas;
  if (report.per_subset_kappas) {
    auto all = nlohmann::ordered_json::array();
    for (double k : *report.per_subset_kappas) {
      if (std::isfinite(k)) {
        all.push_back(k);
      } else {
        all.push_back(nullptr);
      }
    }
    j["per_subset_kappas"] = all;
  }
  if (include_timing) j["wall_time"] = report.wall_time;
  return j.dump(2) + "\n";
}

std::string kappa_csv_header() { return "method,kind,n,k_A,k_B,s,trials,best_seed,subsets_evaluated,kappa_worst\n"; }

std::string kappa_csv_row(const std::string& method, const EncodingPlan& plan, const KappaReport& report) {
  std::string row = method;
  row += "," + std::string(to_string(plan.kind()));
  row += "," + std::to_string(plan.n()) + "," + std::to_string(plan.k_a()) + "," + std::to_string(plan.k_b());
  row += "," + std::to_string(plan.s()) + "," + std::to_string(report.trials) + "," + std::to_string(report.best_seed);
  row += "," + std::to_string(report.subsets_evaluated) + "," + shortest(report.kappa_worst) + "\n";
  return row;
}

}  // namespace scc
