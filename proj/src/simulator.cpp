#include "scc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "scc/decoder.hpp"
#include "scc/error.hpp"
#include "scc/format.hpp"
#include "scc/stability.hpp"

namespace scc {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

// One independently scheduled worker: a homogeneous worker, or a physical
// worker running its slots in order.
struct Unit {
  int report_id = 0;
  int capacity = 1;
  std::vector<const WorkerTask*> slots;
};

struct Event {
  double finish;
  int virtual_id;
};

SimulationReport run(const std::vector<Unit>& units, const EncodingPlan& plan, const DelayModel& delay,
                     const std::vector<StragglerSpec>& stragglers, const std::optional<DenseMatrix>& oracle) {
  delay.validate();
  std::vector<const WorkerTask*> by_virtual(static_cast<std::size_t>(plan.n()), nullptr);
  for (const auto& u : units) {
    for (const auto* t : u.slots) {
      if (t->worker_id < 0 || t->worker_id >= plan.n() || by_virtual[static_cast<std::size_t>(t->worker_id)]) {
        throw Error(ErrorCode::PlanMismatch, "tasks do not cover each of the plan's workers exactly once");
      }
      by_virtual[static_cast<std::size_t>(t->worker_id)] = t;
    }
  }
  if (std::find(by_virtual.begin(), by_virtual.end(), nullptr) != by_virtual.end()) {
    throw Error(ErrorCode::PlanMismatch, "tasks do not cover each of the plan's workers exactly once");
  }

  // Worker computation is real; only the clock is simulated.
  std::vector<TaskOutput> outputs(by_virtual.size());
  const auto n = static_cast<std::int64_t>(by_virtual.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t v = 0; v < n; ++v) outputs[static_cast<std::size_t>(v)] = execute(*by_virtual[static_cast<std::size_t>(v)]);

  std::set<int> known;
  for (const auto& u : units) known.insert(u.report_id);
  std::vector<double> factor(units.size(), 1.0);
  std::vector<char> failed(units.size(), 0), late(units.size(), 0);
  for (const auto& spec : stragglers) {
    for (int id : spec.targets) {
      if (!known.count(id)) throw Error(ErrorCode::InvalidWorker, "straggler target " + std::to_string(id));
      for (std::size_t i = 0; i < units.size(); ++i) {
        if (units[i].report_id != id) continue;
        switch (spec.mode) {
          case StragglerSpec::Mode::failure: failed[i] = 1; break;
          case StragglerSpec::Mode::slowdown_factor: factor[i] *= spec.factor; break;
          case StragglerSpec::Mode::explicit_set: late[i] = 1; break;
        }
      }
    }
  }

  // Noise is drawn in unit/slot order so thread count never changes it.
  std::mt19937_64 rng(delay.seed);
  std::exponential_distribution<double> unit_exp(1.0);
  std::vector<std::vector<double>> finish(units.size());
  for (std::size_t i = 0; i < units.size(); ++i) {
    double clock = 0.0;
    for (const auto* t : units[i].slots) {
      const double base = delay.shift + delay.base_rate * static_cast<double>(outputs[static_cast<std::size_t>(t->worker_id)].flops);
      double noise = 0.0;
      if (delay.kind == DelayModel::Kind::shifted_exponential) {
        noise = unit_exp(rng) * delay.exp_mean.value_or(0.1 * base);
      }
      clock += (base + noise) / units[i].capacity * factor[i];
      finish[i].push_back(failed[i] ? kNever : clock);
    }
  }
  double on_time_max = 0.0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (late[i] || failed[i]) continue;
    for (double f : finish[i]) on_time_max = std::max(on_time_max, f);
  }
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (!late[i] || failed[i]) continue;
    for (double& f : finish[i]) f += on_time_max;
  }

  std::vector<Event> events;
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t k = 0; k < units[i].slots.size(); ++k) {
      if (std::isfinite(finish[i][k])) events.push_back({finish[i][k], units[i].slots[k]->worker_id});
    }
  }
  if (static_cast<int>(events.size()) < plan.tau()) {
    throw Error(ErrorCode::NotEnoughSurvivors, std::to_string(events.size()) + " results can arrive, " +
                                                   std::to_string(plan.tau()) + " needed");
  }
  std::sort(events.begin(), events.end(), [](const Event& x, const Event& y) {
    return x.finish != y.finish ? x.finish < y.finish : x.virtual_id < y.virtual_id;
  });

  SimulationReport report;
  report.total_time = events[static_cast<std::size_t>(plan.tau()) - 1].finish;
  std::vector<DenseMatrix> results;
  for (int j = 0; j < plan.tau(); ++j) {
    const int v = events[static_cast<std::size_t>(j)].virtual_id;
    report.survivor_set.push_back(v);
    results.push_back(outputs[static_cast<std::size_t>(v)].value);
  }
  try {
    report.product = decode(plan, report.survivor_set, results);
    report.decode_ok = true;
    if (oracle) report.relative_error = relative_frobenius_error(report.product, *oracle);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularSystem) throw;
  }

  for (std::size_t i = 0; i < units.size(); ++i) {
    WorkerStats w;
    w.worker_id = units[i].report_id;
    w.failed = failed[i];
    for (std::size_t k = 0; k < units[i].slots.size(); ++k) {
      const auto* t = units[i].slots[k];
      w.compute_flops += outputs[static_cast<std::size_t>(t->worker_id)].flops;
      w.nnz_received += t->transmitted_nnz();
      if (finish[i][k] <= report.total_time) ++w.completed_slots;
    }
    w.finish_time = finish[i].empty() ? 0.0 : finish[i].back();
    report.communication_nnz_total += w.nnz_received;
    report.per_worker.push_back(w);
  }
  return report;
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void DelayModel::validate() const {
  if (base_rate < 0 || shift < 0 || (exp_mean && *exp_mean < 0)) {
    throw Error(ErrorCode::InconsistentParams, "delay model times must be non-negative");
  }
}

StragglerSpec StragglerSpec::failure(std::vector<int> targets) { return {Mode::failure, std::move(targets), 1.0}; }

StragglerSpec StragglerSpec::slowdown(std::vector<int> targets, double factor) {
  if (!(factor >= 1.0)) throw Error(ErrorCode::InconsistentParams, "slowdown factor must be >= 1");
  return {Mode::slowdown_factor, std::move(targets), factor};
}

StragglerSpec StragglerSpec::explicit_set(std::vector<int> targets) {
  return {Mode::explicit_set, std::move(targets), 1.0};
}

TaskOutput execute(const WorkerTask& task) {
  if (task.encoded_b) {
    auto r = spgemm_transpose(task.encoded_a, *task.encoded_b);
    return {std::move(r.value), r.flops};
  }
  if (!task.vector_x) throw Error(ErrorCode::PlanMismatch, "task has neither a B block nor a vector");
  return {spmv_transpose(task.encoded_a, *task.vector_x), static_cast<std::uint64_t>(task.encoded_a.nnz())};
}

SimulationReport simulate(const std::vector<WorkerTask>& tasks, const EncodingPlan& plan, const DelayModel& delay,
                          const std::vector<StragglerSpec>& stragglers, const std::optional<DenseMatrix>& oracle) {
  std::vector<Unit> units;
  for (const auto& t : tasks) units.push_back({t.worker_id, 1, {&t}});
  return run(units, plan, delay, stragglers, oracle);
}

SimulationReport simulate(const std::vector<PhysicalTasks>& tasks, const VirtualMapping& mapping,
                          const EncodingPlan& plan, const DelayModel& delay,
                          const std::vector<StragglerSpec>& stragglers, const std::optional<DenseMatrix>& oracle) {
  check_mapping(mapping, plan);
  if (static_cast<int>(tasks.size()) != mapping.physical_count()) {
    throw Error(ErrorCode::PlanMismatch, "one task list per physical worker is required");
  }
  std::vector<Unit> units;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (static_cast<int>(tasks[i].tasks.size()) != mapping.capacities[i]) {
      throw Error(ErrorCode::PlanMismatch, "physical worker " + std::to_string(tasks[i].physical_id) +
                                               " has the wrong number of slots");
    }
    Unit u{tasks[i].physical_id, mapping.capacities[i], {}};
    for (const auto& t : tasks[i].tasks) u.slots.push_back(&t);
    units.push_back(std::move(u));
  }
  return run(units, plan, delay, stragglers, oracle);
}

CommunicationCost communication_cost(const std::vector<WorkerTask>& tasks) {
  CommunicationCost c;
  for (const auto& t : tasks) {
    c.per_worker.push_back(t.transmitted_nnz());
    c.total += t.transmitted_nnz();
  }
  return c;
}

CommunicationCost communication_cost(const std::vector<PhysicalTasks>& tasks) {
  CommunicationCost c;
  for (const auto& p : tasks) {
    index_t nnz = 0;
    for (const auto& t : p.tasks) nnz += t.transmitted_nnz();
    c.per_worker.push_back(nnz);
    c.total += nnz;
  }
  return c;
}

std::string_view to_string(Scheme scheme) { return scheme == Scheme::proposed ? "proposed" : "dense_baseline"; }

ComparisonTable compare_schemes(const SparseMatrix& a, const SparseMatrix& b_or_x, const SchemeParams& params,
                                const DelayModel& delay, const CompareOptions& options) {
  if (options.repetitions < 1) throw Error(ErrorCode::InconsistentParams, "repetitions must be >= 1");
  if (a.rows() != b_or_x.rows()) throw Error(ErrorCode::ShapeMismatch, "operands need the same row count");
  const bool matvec = params.kind == PlanKind::matvec;
  if (matvec && b_or_x.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "x must be a single column");
  const DenseMatrix oracle =
      matvec ? spmv_transpose(a, b_or_x.to_dense()) : spgemm_transpose(a, b_or_x).value;

  ComparisonTable table;
  const SchemeRow* proposed = nullptr;
  const SchemeRow* dense = nullptr;
  for (Scheme scheme : options.schemes) {
    EncodingPlan plan = [&] {
      if (scheme == Scheme::dense_baseline) {
        return plan_dense_baseline(params.kind, params.n, params.k_a, params.k_b, params.s, params.distribution,
                                   params.seed);
      }
      if (matvec) return plan_matvec(params.n, params.k_a, params.s, params.distribution, params.seed);
      auto [wa, wb] = params.omega_a > 0 ? std::pair{params.omega_a, params.omega_b}
                                         : choose_matmat_weights(params.k_a, params.k_b, params.s);
      return plan_matmat(params.n, params.k_a, params.k_b, params.s, wa, wb, params.distribution, params.seed);
    }();
    plan = plan.with_source_widths(a.cols(), matvec ? 0 : b_or_x.cols());

    std::vector<WorkerTask> tasks;
    if (matvec) {
      tasks = encode_tasks(pad_columns(a, plan.k_a()), b_or_x.to_dense(), plan);
    } else {
      const index_t ka = plan.transposed() ? plan.k_b() : plan.k_a();
      const index_t kb = plan.transposed() ? plan.k_a() : plan.k_b();
      tasks = encode_tasks(pad_columns(a, ka), pad_columns(b_or_x, kb), plan);
    }

    SchemeRow row;
    row.method = std::string(to_string(scheme));
    row.communication_nnz = communication_cost(tasks).total;
    double worker_time = 0.0;
    double total_time = 0.0;
    std::size_t timed = 0;
    for (int r = 0; r < options.repetitions; ++r) {
      DelayModel d = delay;
      d.seed = delay.seed + static_cast<std::uint64_t>(r);
      const auto rep = simulate(tasks, plan, d, options.stragglers, oracle);
      if (r == 0) {
        double flops = 0.0;
        for (const auto& w : rep.per_worker) flops += static_cast<double>(w.compute_flops);
        row.mean_worker_flops = flops / static_cast<double>(rep.per_worker.size());
      }
      for (const auto& w : rep.per_worker) {
        if (std::isfinite(w.finish_time)) {
          worker_time += w.finish_time;
          ++timed;
        }
      }
      total_time += rep.total_time;
      row.decode_ok = row.decode_ok && rep.decode_ok;
      if (rep.relative_error) row.max_decode_error = std::max(row.max_decode_error, *rep.relative_error);
    }
    row.mean_worker_time = timed ? worker_time / static_cast<double>(timed) : 0.0;
    row.mean_total_time = total_time / options.repetitions;
    if (options.with_kappa) {
      KappaOptions ko;
      ko.budget = options.kappa_budget;
      row.kappa_worst = kappa_worst(plan, ko).kappa_worst;
    }
    table.rows.push_back(std::move(row));
  }
  for (const auto& row : table.rows) {
    if (row.method == "proposed") proposed = &row;
    if (row.method == "dense_baseline") dense = &row;
  }
  if (proposed && dense) {
    table.flops_ratio = proposed->mean_worker_flops > 0 ? dense->mean_worker_flops / proposed->mean_worker_flops : 0.0;
    table.communication_ratio = proposed->communication_nnz > 0
                                    ? static_cast<double>(dense->communication_nnz) /
                                          static_cast<double>(proposed->communication_nnz)
                                    : 0.0;
    table.time_ratio = proposed->mean_worker_time > 0 ? dense->mean_worker_time / proposed->mean_worker_time : 0.0;
  }
  if (!matvec) {
    const int kmax = std::max(params.k_a, params.k_b);
    const int kmin = std::min(params.k_a, params.k_b);
    auto [wa, wb] = params.omega_a > 0 ? std::pair{std::max(params.omega_a, params.omega_b),
                                                   std::min(params.omega_a, params.omega_b)}
                                       : choose_matmat_weights(kmax, kmin, params.s);
    const auto ratio = class_based_complexity_ratio(kmax, kmin, params.s, wa, wb);
    table.class_based_ratio = ratio.text;
    table.class_based_ratio_value = ratio.value;
  }
  return table;
}

std::string simulation_report_json(const SimulationReport& report) {
  nlohmann::ordered_json j;
  auto workers = nlohmann::ordered_json::array();
  for (const auto& w : report.per_worker) {
    nlohmann::ordered_json o;
    o["worker_id"] = w.worker_id;
    o["compute_flops"] = w.compute_flops;
    o["nnz_received"] = w.nnz_received;
    o["finish_time"] = number_or_null(w.finish_time);
    o["completed_slots"] = w.completed_slots;
    o["failed"] = w.failed;
    workers.push_back(o);
  }
  j["per_worker"] = workers;
  j["survivor_set"] = report.survivor_set;
  j["decode_ok"] = report.decode_ok;
  if (report.relative_error) j["relative_error"] = *report.relative_error;
  j["total_time"] = number_or_null(report.total_time);
  j["communication_nnz_total"] = report.communication_nnz_total;
  return j.dump(2) + "\n";
}

std::string simulation_report_csv(const SimulationReport& report) {
  std::ostringstream out;
  out << "worker_id,compute_flops,nnz_received,finish_time,completed_slots,failed\n";
  for (const auto& w : report.per_worker) {
    out << w.worker_id << ',' << w.compute_flops << ',' << w.nnz_received << ',' << shortest(w.finish_time) << ','
        << w.completed_slots << ',' << (w.failed ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string comparison_csv_header() {
  return "method,density,worker_comp_flops,worker_comp_time,communication_nnz,kappa_worst,decode_error\n";
}

std::string comparison_csv_rows(const ComparisonTable& table, double density) {
  std::ostringstream out;
  for (const auto& r : table.rows) {
    out << r.method << ',' << shortest(density) << ',' << shortest(r.mean_worker_flops) << ','
        << shortest(r.mean_worker_time) << ',' << r.communication_nnz << ','
        << (r.kappa_worst ? shortest(*r.kappa_worst) : "") << ',' << shortest(r.max_decode_error) << '\n';
  }
  if (table.flops_ratio > 0) {
    out << "ratio_dense_over_proposed," << shortest(density) << ',' << shortest(table.flops_ratio) << ','
        << shortest(table.time_ratio) << ',' << shortest(table.communication_ratio) << ",,\n";
  }
  return out.str();
}

std::string comparison_json(const ComparisonTable& table) {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    nlohmann::ordered_json o;
    o["method"] = r.method;
    o["worker_comp_flops"] = r.mean_worker_flops;
    o["worker_comp_time"] = r.mean_worker_time;
    o["total_time"] = r.mean_total_time;
    o["communication_nnz"] = r.communication_nnz;
    if (r.kappa_worst) o["kappa_worst"] = number_or_null(*r.kappa_worst);
    o["decode_ok"] = r.decode_ok;
    o["decode_error"] = r.max_decode_error;
    rows.push_back(o);
  }
  j["schemes"] = rows;
  j["flops_ratio"] = table.flops_ratio;
  j["communication_ratio"] = table.communication_ratio;
  j["time_ratio"] = table.time_ratio;
  if (!table.class_based_ratio.empty()) {
    j["class_based_ratio"] = table.class_based_ratio;
    j["class_based_ratio_value"] = table.class_based_ratio_value;
  }
  return j.dump(2) + "\n";
}

}  // namespace scc
