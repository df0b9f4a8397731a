#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include <json.hpp>

#include "oracles.hpp"
#include "scc/simulator.hpp"
#include "test_util.hpp"

using namespace scc;
using testutil::code_of;

namespace {

DelayModel deterministic(double base_rate = 1e-6, double shift = 0.0) {
  DelayModel d;
  d.kind = DelayModel::Kind::deterministic;
  d.base_rate = base_rate;
  d.shift = shift;
  return d;
}

struct Matmat27Case {
  SparseMatrix a = generate_random_sparse(80, 12, 0.2, 1);
  SparseMatrix b = generate_random_sparse(80, 8, 0.2, 2);
  EncodingPlan plan = plan_matmat(27, 6, 4, 3, 2, 2, Distribution::normal(0, 1), 3);
  std::vector<WorkerTask> tasks = encode_tasks(a, b, plan);
  DenseMatrix truth = spgemm_transpose(a, b).value;
};

}  // namespace

TEST(Execute, FlopsCountStoredProducts) {
  Matmat27Case c;
  for (const auto& t : c.tasks) {
    auto out = execute(t);
    EXPECT_EQ(out.flops, oracle::outer_product_flops(t.encoded_a, *t.encoded_b));
  }
  auto p = plan_matvec(3, 2, 1);
  auto a = generate_random_sparse(20, 4, 0.5, 3);
  auto tasks = encode_tasks(a, DenseMatrix(20, 1, 1.0), p);
  EXPECT_EQ(execute(tasks[0]).flops, static_cast<std::uint64_t>(tasks[0].encoded_a.nnz()));
}

TEST(Simulate, OneFailureWithinBudgetDecodes) {
  auto p = plan_matvec(5, 4, 1, Distribution::normal(0, 1), 1);
  auto a = generate_random_sparse(50, 8, 0.3, 4);
  auto x = generate_random_dense(50, 1, 5);
  auto tasks = encode_tasks(a, x, p);
  const auto truth = spmv_transpose(a, x);
  for (int w = 0; w < 5; ++w) {
    auto rep = simulate(tasks, p, DelayModel{}, {StragglerSpec::failure({w})}, truth);
    EXPECT_TRUE(rep.decode_ok);
    ASSERT_TRUE(rep.relative_error);
    EXPECT_LE(*rep.relative_error, 1e-8);
    EXPECT_EQ(std::count(rep.survivor_set.begin(), rep.survivor_set.end(), w), 0);
    EXPECT_TRUE(rep.per_worker[w].failed);
    EXPECT_TRUE(std::isinf(rep.per_worker[w].finish_time));
  }
}

TEST(Simulate, TooManyFailuresIsReported) {
  Matmat27Case c;
  EXPECT_EQ(code_of([&] { simulate(c.tasks, c.plan, DelayModel{}, {StragglerSpec::failure({0, 1, 2, 3})}); }),
            ErrorCode::NotEnoughSurvivors);
  EXPECT_EQ(code_of([&] { simulate(c.tasks, c.plan, DelayModel{}, {StragglerSpec::failure({27})}); }),
            ErrorCode::InvalidWorker);
}

TEST(Simulate, EveryThreeFailuresDecodeTwentySevenWorker) {
  Matmat27Case c;
  int runs = 0;
  oracle::for_each_subset(27, 3, [&](const std::vector<int>& gone) {
    if (++runs % 97 != 0) return;  // a spread-out sample of the 2925 patterns
    auto rep = simulate(c.tasks, c.plan, DelayModel{}, {StragglerSpec::failure(gone)}, c.truth);
    EXPECT_TRUE(rep.decode_ok);
    EXPECT_LE(*rep.relative_error, 1e-8);
  });
}

TEST(Simulate, DeterministicClockFollowsFlops) {
  Matmat27Case c;
  auto rep = simulate(c.tasks, c.plan, deterministic(2e-6, 0.5));
  std::vector<std::pair<double, int>> order;
  for (const auto& t : c.tasks) {
    const double want = 0.5 + 2e-6 * static_cast<double>(oracle::outer_product_flops(t.encoded_a, *t.encoded_b));
    EXPECT_DOUBLE_EQ(rep.per_worker[t.worker_id].finish_time, want);
    order.push_back({want, t.worker_id});
  }
  std::sort(order.begin(), order.end());
  for (int j = 0; j < 24; ++j) EXPECT_EQ(rep.survivor_set[j], order[j].second);
  EXPECT_DOUBLE_EQ(rep.total_time, order[23].first);
  EXPECT_FALSE(rep.relative_error);  // no oracle given
}

TEST(Simulate, SlowdownScalesFinishTime) {
  Matmat27Case c;
  auto base = simulate(c.tasks, c.plan, deterministic());
  auto slow = simulate(c.tasks, c.plan, deterministic(), {StragglerSpec::slowdown({4, 9}, 3.0)});
  EXPECT_DOUBLE_EQ(slow.per_worker[4].finish_time, 3.0 * base.per_worker[4].finish_time);
  EXPECT_DOUBLE_EQ(slow.per_worker[9].finish_time, 3.0 * base.per_worker[9].finish_time);
  EXPECT_DOUBLE_EQ(slow.per_worker[5].finish_time, base.per_worker[5].finish_time);
  EXPECT_EQ(code_of([] { StragglerSpec::slowdown({1}, 0.5); }), ErrorCode::InconsistentParams);
}

TEST(Simulate, ExplicitStragglersArriveLast) {
  Matmat27Case c;
  auto rep = simulate(c.tasks, c.plan, DelayModel{}, {StragglerSpec::explicit_set({2, 13, 21})}, c.truth);
  EXPECT_TRUE(rep.decode_ok);
  for (int w : {2, 13, 21}) {
    EXPECT_EQ(std::count(rep.survivor_set.begin(), rep.survivor_set.end(), w), 0);
    EXPECT_GT(rep.per_worker[w].finish_time, rep.total_time);
    EXPECT_EQ(rep.per_worker[w].completed_slots, 0);
  }
}

TEST(Simulate, NoiseIsNonNegativeAndSeeded) {
  Matmat27Case c;
  auto det = simulate(c.tasks, c.plan, deterministic());
  DelayModel noisy = deterministic();
  noisy.kind = DelayModel::Kind::shifted_exponential;
  noisy.seed = 17;
  auto r1 = simulate(c.tasks, c.plan, noisy);
  auto r2 = simulate(c.tasks, c.plan, noisy);
  EXPECT_EQ(simulation_report_json(r1), simulation_report_json(r2));
  EXPECT_EQ(simulation_report_csv(r1), simulation_report_csv(r2));
  bool differs = false;
  for (int w = 0; w < 27; ++w) {
    EXPECT_GE(r1.per_worker[w].finish_time, det.per_worker[w].finish_time);
    differs = differs || r1.per_worker[w].finish_time != det.per_worker[w].finish_time;
  }
  EXPECT_TRUE(differs);
  noisy.seed = 18;
  EXPECT_NE(simulation_report_json(simulate(c.tasks, c.plan, noisy)), simulation_report_json(r1));
  DelayModel bad;
  bad.shift = -1.0;
  EXPECT_EQ(code_of([&] { simulate(c.tasks, c.plan, bad); }), ErrorCode::InconsistentParams);
}

TEST(Simulate, ReportSerialization) {
  Matmat27Case c;
  auto rep = simulate(c.tasks, c.plan, DelayModel{}, {StragglerSpec::failure({0})}, c.truth);
  auto j = nlohmann::json::parse(simulation_report_json(rep));
  EXPECT_TRUE(j["decode_ok"].get<bool>());
  EXPECT_TRUE(j.contains("relative_error"));
  EXPECT_TRUE(j["per_worker"][0]["finish_time"].is_null());
  EXPECT_EQ(j["survivor_set"].size(), 24u);
  auto plain = simulate(c.tasks, c.plan, DelayModel{});
  EXPECT_FALSE(nlohmann::json::parse(simulation_report_json(plain)).contains("relative_error"));
  const auto csv = simulation_report_csv(rep);
  EXPECT_EQ(csv.rfind("worker_id,compute_flops,nnz_received,finish_time,completed_slots,failed\n", 0), 0u);
  EXPECT_NE(csv.find("\n0,"), std::string::npos);
}

TEST(Simulate, HeterogeneousScenario) {
  auto mapping = virtualize(HeterogeneousProfile::from_capacities({2, 2, 1, 1, 1, 1, 1}), 5);
  auto plan = plan_matvec(mapping.n_virtual, mapping.k, mapping.s, Distribution::normal(0, 1), 2);
  auto a = generate_random_sparse(60, 14, 0.3, 1);
  auto x = generate_random_dense(60, 1, 2);
  auto groups = assign_hetero_tasks(a, x, mapping, plan);
  // unit slot time: W_0 (slowed 1.5x) finishes slots at 0.75 and 1.5, W_1 at
  // 0.5 and 1.0, the rest at 1.0; W_6 never returns.
  auto rep = simulate(groups, mapping, plan, deterministic(0.0, 1.0),
                      {StragglerSpec::failure({6}), StragglerSpec::slowdown({0}, 1.5)}, spmv_transpose(a, x));
  EXPECT_TRUE(rep.decode_ok);
  EXPECT_LE(*rep.relative_error, 1e-8);
  EXPECT_EQ(rep.survivor_set, (std::vector<int>{2, 0, 3, 4, 5, 6, 7}));
  EXPECT_EQ(rep.per_worker[0].completed_slots, 1);
  EXPECT_DOUBLE_EQ(rep.per_worker[0].finish_time, 1.5);
  EXPECT_EQ(rep.per_worker[1].completed_slots, 2);
  EXPECT_TRUE(rep.per_worker[6].failed);
  EXPECT_DOUBLE_EQ(rep.total_time, 1.0);
}

// Collected slots of each physical worker always form a prefix of its slot order.
TEST(Simulate, HeterogeneousCollectionRespectsSlotOrder) {
  auto mapping = virtualize(HeterogeneousProfile::from_capacities({3, 2, 2, 1, 1, 1}), 4);
  auto plan = plan_matvec(mapping.n_virtual, mapping.k, mapping.s, Distribution::normal(0, 1), 4);
  auto a = generate_random_sparse(60, plan.k_a() * 3, 0.2, 6);
  auto groups = assign_hetero_tasks(a, DenseMatrix(60, 1, 1.0), mapping, plan);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    DelayModel d;
    d.seed = seed;
    d.shift = 1.0;
    d.exp_mean = 2.0;
    auto rep = simulate(groups, mapping, plan, d);
    std::map<int, std::vector<int>> slots;
    for (int v : rep.survivor_set) slots[mapping.virtual_to_physical[v].physical_index].push_back(
        mapping.virtual_to_physical[v].slot);
    for (auto& [phys, got] : slots) {
      std::sort(got.begin(), got.end());
      for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k], static_cast<int>(k)) << "physical " << phys;
    }
  }
}

TEST(Communication, CountsEncodedNonzeros) {
  Matmat27Case c;
  auto cost = communication_cost(c.tasks);
  index_t sum = 0;
  for (std::size_t i = 0; i < c.tasks.size(); ++i) {
    const index_t want = c.tasks[i].encoded_a.nnz() + c.tasks[i].encoded_b->nnz();
    EXPECT_EQ(cost.per_worker[i], want);
    sum += want;
  }
  EXPECT_EQ(cost.total, sum);
}

TEST(Communication, PerWorkerNnzFollowsDensityLaw) {
  const double eta = 0.01;
  auto a = generate_random_sparse(2000, 600, eta, 1);
  auto b = generate_random_sparse(2000, 400, eta, 2);
  auto plan = plan_matmat(27, 6, 4, 3, 2, 2, Distribution::normal(0, 1), 1);
  auto cost = communication_cost(encode_tasks(a, b, plan));
  const double want = 2000.0 * 100 * (1 - std::pow(1 - eta, 2)) + 2000.0 * 100 * (1 - std::pow(1 - eta, 2));
  EXPECT_NEAR(static_cast<double>(cost.total) / 27.0, want, 0.03 * want);
}

TEST(CompareSchemes, SparsityAdvantageAndRatios) {
  auto a = generate_random_sparse(600, 120, 0.05, 1);
  auto b = generate_random_sparse(600, 80, 0.05, 2);
  SchemeParams params;
  params.kind = PlanKind::matmat;
  params.n = 27;
  params.k_a = 6;
  params.k_b = 4;
  params.s = 3;
  params.omega_a = 2;
  params.omega_b = 2;
  CompareOptions opts;
  opts.repetitions = 2;
  opts.stragglers = {StragglerSpec::failure({1, 8, 20})};
  auto table = compare_schemes(a, b, params, DelayModel{}, opts);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].method, "proposed");
  EXPECT_EQ(table.rows[1].method, "dense_baseline");
  for (const auto& r : table.rows) {
    EXPECT_TRUE(r.decode_ok);
    EXPECT_LE(r.max_decode_error, 1e-8);
  }
  EXPECT_GT(table.flops_ratio, 1.0);
  EXPECT_GT(table.communication_ratio, 1.0);
  EXPECT_NEAR(table.flops_ratio, table.rows[1].mean_worker_flops / table.rows[0].mean_worker_flops, 1e-12);
  // k_A (k_B + s) / (k_A k_B + s), scaled by zeta / (omega_A omega_B); minimum zeta for k_B = 4, s = 3 is 3
  EXPECT_EQ(table.class_based_ratio, "42/27*3/4");
  EXPECT_NEAR(table.class_based_ratio_value, 42.0 / 27.0 * 3.0 / 4.0, 1e-15);
  auto again = compare_schemes(a, b, params, DelayModel{}, opts);
  EXPECT_EQ(comparison_json(again), comparison_json(table));
  const auto csv = comparison_csv_rows(table, 0.05);
  EXPECT_NE(csv.find("ratio_dense_over_proposed,0.05,"), std::string::npos);
}

TEST(CompareSchemes, DenseInputRemovesAdvantage) {
  DenseMatrix da(40, 12), db(40, 8);
  for (double& v : da.values()) v = 1.0;
  for (double& v : db.values()) v = 2.0;
  SchemeParams params;
  params.kind = PlanKind::matmat;
  params.n = 27;
  params.k_a = 6;
  params.k_b = 4;
  params.s = 3;
  auto table = compare_schemes(SparseMatrix::from_dense(da), SparseMatrix::from_dense(db), params, DelayModel{});
  EXPECT_DOUBLE_EQ(table.flops_ratio, 1.0);
  EXPECT_DOUBLE_EQ(table.communication_ratio, 1.0);
}

TEST(CompareSchemes, MatvecAndPaddedShapes) {
  auto a = generate_random_sparse(300, 31, 0.1, 3);
  auto x = SparseMatrix::from_dense(generate_random_dense(300, 1, 4));
  SchemeParams params;
  params.kind = PlanKind::matvec;
  params.n = 12;
  params.k_a = 10;
  params.s = 2;
  CompareOptions opts;
  opts.with_kappa = true;
  auto table = compare_schemes(a, x, params, DelayModel{}, opts);
  for (const auto& r : table.rows) {
    EXPECT_TRUE(r.decode_ok);
    EXPECT_LE(r.max_decode_error, 1e-8);
    ASSERT_TRUE(r.kappa_worst);
    EXPECT_TRUE(std::isfinite(*r.kappa_worst));
  }
  EXPECT_TRUE(table.class_based_ratio.empty());
  EXPECT_EQ(code_of([&] { compare_schemes(a, generate_random_sparse(300, 2, 0.5, 1), params, DelayModel{}); }),
            ErrorCode::ShapeMismatch);
}
