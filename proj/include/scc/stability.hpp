#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scc/matrix.hpp"
#include "scc/plan.hpp"

namespace scc {

struct KappaReport {
  double kappa_worst = 1.0;
  std::vector<int> argmax_straggler_set;
  std::optional<std::vector<double>> per_subset_kappas;  // lexicographic subset order
  std::uint64_t subsets_evaluated = 0;
  double wall_time = 0.0;
  bool estimate = false;  // Monte Carlo sample, not the full enumeration

  // Filled by coefficient_search.
  int trials = 1;
  std::uint64_t best_seed = 0;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<double> trial_kappas;
};

enum class Execution { serial, parallel };

struct KappaOptions {
  std::uint64_t budget = 1'000'000;
  bool keep_per_subset = false;
  Execution execution = Execution::parallel;
};

/// 2-norm condition number sigma_max / sigma_min; +inf when sigma_min is
/// zero up to rounding.
double condition_number(const DenseMatrix& m);

/// C(n, k) as a double (exact up to 2^53, saturates gracefully after).
double binomial(int n, int k);

/// The straggler set of lexicographic rank `rank` among the k-subsets of [0, n).
std::vector<int> unrank_combination(int n, int k, std::uint64_t rank);

/// Max condition number over every s-straggler pattern. Throws BudgetExceeded
/// when C(n, s) > options.budget. Ties in the max go to the lexicographically
/// first straggler set.
KappaReport kappa_worst(const EncodingPlan& plan, const KappaOptions& options = {});

/// Same maximum over `samples` uniformly drawn straggler sets; a lower
/// estimate of kappa_worst for plans too large to enumerate.
KappaReport kappa_estimate(const EncodingPlan& plan, std::uint64_t samples, std::uint64_t seed,
                           Execution execution = Execution::parallel);

struct SearchResult {
  EncodingPlan plan;  // skeleton carrying the winning coefficients
  KappaReport report;
};

/// Best of `trials` coefficient draws, trial t seeded with base_seed + t.
/// report.subsets_evaluated sums over all trials; the winner is the first
/// draw attaining the minimum.
SearchResult coefficient_search(const EncodingPlan& skeleton, int trials, const Distribution& dist,
                                std::uint64_t base_seed, const KappaOptions& options = {});

struct SearchCost {
  std::int64_t delta_a = 0;  // LCM(n, k_A)
  double proposed = 0.0;     // C(n, tau) tau^3
  double lcm_scheme = 0.0;   // C(n, tau) (delta_a k_B)^3
  double ratio = 0.0;
};

SearchCost competitor_search_cost(int n, int k_a, int k_b, int s);

/// Per-worker complexity of the class-based scheme over ours,
/// k_A (k_B + s) / n * zeta / (omega_A omega_B).
struct ComplexityRatio {
  int zeta = 0;
  std::int64_t numerator = 0;
  std::int64_t denominator = 0;
  double value = 0.0;
  std::string text;  // "72/51", or "72/51*5/4" when zeta != omega_A omega_B
};

/// Smallest zeta the class-based scheme admits: 1 + k_B - ceil(k_B / c), c = 1 + ceil(s / k_B).
int class_based_min_zeta(int k_b, int s);

ComplexityRatio class_based_complexity_ratio(int k_a, int k_b, int s, int omega_a, int omega_b,
                                             std::optional<int> zeta = std::nullopt);

std::string kappa_report_json(const KappaReport& report, bool include_timing = false);
std::string kappa_csv_header();
std::string kappa_csv_row(const std::string& method, const EncodingPlan& plan, const KappaReport& report);

}  // namespace scc
