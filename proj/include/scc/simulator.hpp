#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scc/encode.hpp"
#include "scc/hetero.hpp"
#include "scc/plan.hpp"

namespace scc {

/// Slot time = (shift + base_rate * flops + Exp(exp_mean)) / capacity, then
/// scaled by any slowdown. Without an explicit exp_mean the noise mean is
/// 10% of the deterministic part of that slot.
struct DelayModel {
  enum class Kind { deterministic, shifted_exponential };

  Kind kind = Kind::shifted_exponential;
  double base_rate = 1e-9;  // seconds per multiply-accumulate
  double shift = 0.0;
  std::optional<double> exp_mean;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Targets are virtual worker ids for homogeneous runs and physical worker
/// ids for heterogeneous ones.
struct StragglerSpec {
  enum class Mode { explicit_set, slowdown_factor, failure };

  Mode mode = Mode::failure;
  std::vector<int> targets;
  double factor = 1.0;  // slowdown_factor only

  static StragglerSpec failure(std::vector<int> targets);
  static StragglerSpec slowdown(std::vector<int> targets, double factor);
  static StragglerSpec explicit_set(std::vector<int> targets);
};

/// Multiply-accumulate count of one task and its dense result.
struct TaskOutput {
  DenseMatrix value;
  std::uint64_t flops = 0;
};

TaskOutput execute(const WorkerTask& task);

struct WorkerStats {
  int worker_id = 0;  // virtual id, or physical id in heterogeneous runs
  std::uint64_t compute_flops = 0;
  index_t nnz_received = 0;
  double finish_time = 0.0;  // +inf for a failed worker
  int completed_slots = 0;   // slots finished by the time decoding started
  bool failed = false;
};

struct SimulationReport {
  std::vector<WorkerStats> per_worker;
  std::vector<int> survivor_set;  // virtual ids in collection order
  bool decode_ok = false;
  std::optional<double> relative_error;  // set when decoding succeeded against an oracle
  double total_time = 0.0;
  index_t communication_nnz_total = 0;
  DenseMatrix product;  // empty unless decode_ok
};

/// Homogeneous run: one task per worker. Throws NotEnoughSurvivors when
/// fewer than tau results can ever arrive.
SimulationReport simulate(const std::vector<WorkerTask>& tasks, const EncodingPlan& plan, const DelayModel& delay,
                          const std::vector<StragglerSpec>& stragglers = {},
                          const std::optional<DenseMatrix>& oracle = std::nullopt);

/// Heterogeneous run: each physical worker computes its slots in order.
SimulationReport simulate(const std::vector<PhysicalTasks>& tasks, const VirtualMapping& mapping,
                          const EncodingPlan& plan, const DelayModel& delay,
                          const std::vector<StragglerSpec>& stragglers = {},
                          const std::optional<DenseMatrix>& oracle = std::nullopt);

struct CommunicationCost {
  std::vector<index_t> per_worker;
  index_t total = 0;
};

CommunicationCost communication_cost(const std::vector<WorkerTask>& tasks);
CommunicationCost communication_cost(const std::vector<PhysicalTasks>& tasks);

struct SchemeParams {
  PlanKind kind = PlanKind::matmat;
  int n = 0;
  int k_a = 1;
  int k_b = 1;
  int s = 0;
  int omega_a = 0;  // 0 picks the default weights
  int omega_b = 0;
  Distribution distribution;
  std::uint64_t seed = 0;
};

enum class Scheme { proposed, dense_baseline };
std::string_view to_string(Scheme scheme);

struct SchemeRow {
  std::string method;
  double mean_worker_flops = 0.0;
  double mean_worker_time = 0.0;  // simulated, averaged over workers and repetitions
  double mean_total_time = 0.0;
  index_t communication_nnz = 0;
  std::optional<double> kappa_worst;
  double max_decode_error = 0.0;
  bool decode_ok = true;
};

struct ComparisonTable {
  std::vector<SchemeRow> rows;
  // dense baseline over proposed; 0 when either scheme is missing
  double flops_ratio = 0.0;
  double communication_ratio = 0.0;
  double time_ratio = 0.0;
  std::string class_based_ratio;  // matmat only, e.g. "72/51"
  double class_based_ratio_value = 0.0;
};

struct CompareOptions {
  std::vector<Scheme> schemes = {Scheme::proposed, Scheme::dense_baseline};
  int repetitions = 1;
  bool with_kappa = false;
  std::uint64_t kappa_budget = 1'000'000;
  std::vector<StragglerSpec> stragglers;
};

/// Builds each scheme's plan on the same (n, k, s), pads operands to the block
/// counts, runs the simulator `repetitions` times (delay seed + r) and checks
/// every decode against the dense product.
ComparisonTable compare_schemes(const SparseMatrix& a, const SparseMatrix& b_or_x, const SchemeParams& params,
                                const DelayModel& delay, const CompareOptions& options = {});

std::string simulation_report_json(const SimulationReport& report);
std::string simulation_report_csv(const SimulationReport& report);

std::string comparison_csv_header();
/// Rows tagged with the operand density; ratio rows use method "ratio_dense_over_proposed".
std::string comparison_csv_rows(const ComparisonTable& table, double density);
std::string comparison_json(const ComparisonTable& table);

}  // namespace scc
