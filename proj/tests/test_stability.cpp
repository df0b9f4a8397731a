#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "oracles.hpp"
#include "scc/decoder.hpp"
#include "scc/stability.hpp"
#include "test_util.hpp"

using namespace scc;
using testutil::code_of;

TEST(ConditionNumber, SimpleMatrices) {
  EXPECT_DOUBLE_EQ(condition_number(DenseMatrix::identity(5)), 1.0);
  DenseMatrix d(2, 2);
  d(0, 0) = 10.0;
  d(1, 1) = 0.1;
  EXPECT_NEAR(condition_number(d), 100.0, 1e-12);
  DenseMatrix singular(3, 3, 1.0);
  EXPECT_TRUE(std::isinf(condition_number(singular)));
  EXPECT_TRUE(std::isinf(condition_number(DenseMatrix(4, 4))));
}

TEST(ConditionNumber, MatchesJacobiSvdAndIgnoresScale) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    DenseMatrix m(12, 12);
    for (double& v : m.values()) v = g(rng);
    const double k = condition_number(m);
    EXPECT_NEAR(k / oracle::condition(oracle::to_rows(m)), 1.0, 1e-9);
    DenseMatrix scaled = m;
    for (double& v : scaled.values()) v *= -37.5;
    EXPECT_NEAR(condition_number(scaled) / k, 1.0, 1e-12);
  }
}

TEST(Combinatorics, BinomialAgreesWithPascal) {
  for (int n = 0; n <= 40; ++n)
    for (int k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), static_cast<double>(oracle::choose(n, k)));
  EXPECT_EQ(binomial(5, 7), 0.0);
}

TEST(Combinatorics, UnrankWalksLexicographicOrder) {
  std::uint64_t rank = 0;
  oracle::for_each_subset(9, 4, [&](const std::vector<int>& subset) {
    EXPECT_EQ(unrank_combination(9, 4, rank), subset) << "rank " << rank;
    ++rank;
  });
  EXPECT_EQ(rank, oracle::choose(9, 4));
}

TEST(KappaWorst, TwelveWorkersMatchesBruteForce) {
  auto p = plan_matvec(12, 10, 2, Distribution::normal(0, 1), 1);
  KappaOptions opts;
  opts.keep_per_subset = true;
  auto rep = kappa_worst(p, opts);
  EXPECT_EQ(rep.subsets_evaluated, 66u);
  ASSERT_TRUE(rep.per_subset_kappas);
  ASSERT_EQ(rep.per_subset_kappas->size(), 66u);
  double worst = 0.0;
  std::vector<int> argmax;
  std::size_t i = 0;
  oracle::for_each_subset(12, 2, [&](const std::vector<int>& gone) {
    const auto m = stacked_effective_rows(p, oracle::complement(12, gone));
    const double k = oracle::condition(oracle::to_rows(m));
    EXPECT_TRUE(std::isfinite(k));
    EXPECT_NEAR((*rep.per_subset_kappas)[i] / k, 1.0, 1e-8);
    if (k > worst) {
      worst = k;
      argmax = gone;
    }
    ++i;
  });
  EXPECT_NEAR(rep.kappa_worst / worst, 1.0, 1e-8);
  EXPECT_EQ(rep.argmax_straggler_set, argmax);
  EXPECT_GE(rep.kappa_worst, 1.0);
  EXPECT_EQ(rep.kappa_worst, *std::max_element(rep.per_subset_kappas->begin(), rep.per_subset_kappas->end()));
}

TEST(KappaWorst, NoStragglersIsTheFullSystem) {
  auto p = plan_matvec(6, 6, 0, Distribution::normal(0, 1), 2);
  auto rep = kappa_worst(p);
  EXPECT_EQ(rep.subsets_evaluated, 1u);
  EXPECT_TRUE(rep.argmax_straggler_set.empty());
  std::vector<int> all = {0, 1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(rep.kappa_worst, condition_number(stacked_effective_rows(p, all)));
}

TEST(KappaWorst, SerialAndParallelAgree) {
  auto p = plan_matmat(27, 6, 4, 3, 2, 2, Distribution::normal(0, 1), 4);
  KappaOptions serial;
  serial.execution = Execution::serial;
  serial.keep_per_subset = true;
  KappaOptions parallel = serial;
  parallel.execution = Execution::parallel;
  auto a = kappa_worst(p, serial);
  auto b = kappa_worst(p, parallel);
  EXPECT_EQ(a.kappa_worst, b.kappa_worst);
  EXPECT_EQ(a.argmax_straggler_set, b.argmax_straggler_set);
  EXPECT_EQ(*a.per_subset_kappas, *b.per_subset_kappas);
  EXPECT_EQ(a.subsets_evaluated, 2925u);
}

TEST(KappaWorst, BudgetIsEnforced) {
  auto p = plan_matvec(30, 28, 2);
  KappaOptions opts;
  opts.budget = 434;
  EXPECT_EQ(code_of([&] { kappa_worst(p, opts); }), ErrorCode::BudgetExceeded);
  opts.budget = 435;
  EXPECT_NO_THROW(kappa_worst(p, opts));
}

TEST(KappaWorst, SingularSubsetGivesInfinity) {
  auto p = plan_matvec(12, 10, 2, Distribution::normal(0, 1), 4);
  auto parts = p.parts();
  for (int q = 0; q < p.k_a(); ++q) parts.coeffs.a(11, q) = parts.coeffs.a(1, q);
  auto rep = kappa_worst(EncodingPlan(parts));
  EXPECT_TRUE(std::isinf(rep.kappa_worst));
}

TEST(KappaEstimate, IsALowerBoundAndDeterministic) {
  auto p = plan_matmat(27, 6, 4, 3, 2, 2, Distribution::normal(0, 1), 5);
  auto full = kappa_worst(p);
  auto est = kappa_estimate(p, 300, 7);
  EXPECT_TRUE(est.estimate);
  EXPECT_EQ(est.subsets_evaluated, 300u);
  EXPECT_LE(est.kappa_worst, full.kappa_worst);
  auto again = kappa_estimate(p, 300, 7, Execution::serial);
  EXPECT_EQ(again.kappa_worst, est.kappa_worst);
  EXPECT_EQ(again.argmax_straggler_set, est.argmax_straggler_set);
  EXPECT_EQ(code_of([&] { kappa_estimate(p, 0, 1); }), ErrorCode::InconsistentParams);
}

TEST(CoefficientSearch, SingleTrialEqualsKappaWorst) {
  auto skeleton = plan_matvec(12, 10, 2);
  auto res = coefficient_search(skeleton, 1, Distribution::normal(0, 1), 42);
  auto direct = kappa_worst(skeleton.with_coefficients(sample_coefficients(skeleton, Distribution::normal(0, 1), 42)));
  EXPECT_EQ(res.report.kappa_worst, direct.kappa_worst);
  EXPECT_EQ(res.report.best_seed, 42u);
}

TEST(CoefficientSearch, KeepsTheMinimumAndIsReproducible) {
  auto skeleton = plan_matvec(12, 10, 2);
  auto res = coefficient_search(skeleton, 8, Distribution::uniform(-1, 1), 100);
  ASSERT_EQ(res.report.trial_kappas.size(), 8u);
  for (std::size_t t = 0; t < 8; ++t) {
    EXPECT_EQ(res.report.trial_seeds[t], 100u + t);
    EXPECT_LE(res.report.kappa_worst, res.report.trial_kappas[t]);
  }
  EXPECT_EQ(res.report.subsets_evaluated, 8u * 66u);
  auto again = coefficient_search(skeleton, 8, Distribution::uniform(-1, 1), 100);
  EXPECT_EQ(plan_to_json(again.plan), plan_to_json(res.plan));
  EXPECT_EQ(again.report.trial_kappas, res.report.trial_kappas);
  // The winning plan carries the winning coefficients.
  EXPECT_EQ(kappa_worst(res.plan).kappa_worst, res.report.kappa_worst);
  EXPECT_EQ(code_of([&] { coefficient_search(skeleton, 0, Distribution{}, 0); }), ErrorCode::InconsistentParams);
}

TEST(SearchCost, LcmBlockCounts) {
  EXPECT_EQ(competitor_search_cost(30, 28, 1, 2).delta_a, 420);
  EXPECT_EQ(competitor_search_cost(30, 27, 1, 3).delta_a, 270);
  EXPECT_EQ(oracle::lcm(30, 28), 420);
  EXPECT_EQ(oracle::lcm(30, 27), 270);
  for (int n : {11, 13, 17}) {
    const int k = n - 2;
    auto c = competitor_search_cost(n, k, 1, 2);
    EXPECT_EQ(c.delta_a, oracle::lcm(n, k));
    const double tau = k;
    EXPECT_NEAR(c.ratio, std::pow(static_cast<double>(c.delta_a) / tau, 3), 1e-9 * c.ratio);
  }
  auto m = competitor_search_cost(27, 6, 4, 3);
  EXPECT_EQ(m.delta_a, 54);
  const double subsets = static_cast<double>(oracle::choose(27, 24));
  EXPECT_NEAR(m.proposed / (subsets * std::pow(24.0, 3)), 1.0, 1e-12);
  EXPECT_NEAR(m.lcm_scheme / (subsets * std::pow(54.0 * 4, 3)), 1.0, 1e-12);
  EXPECT_EQ(code_of([] { competitor_search_cost(30, 28, 1, 3); }), ErrorCode::InconsistentParams);
}

TEST(ClassBased, ComplexityRatioText) {
  EXPECT_EQ(class_based_min_zeta(6, 3), 4);
  auto r = class_based_complexity_ratio(8, 6, 3, 2, 2);
  EXPECT_EQ(r.zeta, 4);
  EXPECT_EQ(r.text, "72/51");
  EXPECT_NEAR(r.value, 72.0 / 51.0, 1e-15);
  auto five = class_based_complexity_ratio(8, 6, 3, 2, 2, 5);
  EXPECT_EQ(five.text, "72/51*5/4");
  EXPECT_NEAR(five.value, 72.0 / 51.0 * 5.0 / 4.0, 1e-15);
}

TEST(KappaOutput, JsonAndCsvAreStable) {
  auto skeleton = plan_matvec(12, 10, 2);
  auto res = coefficient_search(skeleton, 3, Distribution::normal(0, 1), 0);
  auto j = nlohmann::json::parse(kappa_report_json(res.report));
  EXPECT_EQ(j["kappa_worst"].get<double>(), res.report.kappa_worst);
  EXPECT_EQ(j["subsets_evaluated"].get<std::uint64_t>(), 198u);
  EXPECT_FALSE(j.contains("wall_time"));
  EXPECT_TRUE(nlohmann::json::parse(kappa_report_json(res.report, true)).contains("wall_time"));
  EXPECT_EQ(kappa_csv_header(), "method,kind,n,k_A,k_B,s,trials,best_seed,subsets_evaluated,kappa_worst\n");
  const auto row = kappa_csv_row("proposed", res.plan, res.report);
  EXPECT_EQ(row.rfind("proposed,matvec,12,10,1,2,3,", 0), 0u) << row;
  EXPECT_EQ(row, kappa_csv_row("proposed", res.plan, res.report));
}
