#include "scc/hetero.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "scc/error.hpp"

namespace scc {

HeterogeneousProfile HeterogeneousProfile::normalized(std::vector<PhysicalWorker> workers) {
  if (workers.empty()) throw Error(ErrorCode::InvalidProfile, "profile lists no workers");
  std::set<int> ids;
  int min_capacity = workers.front().capacity;
  for (const auto& w : workers) {
    if (w.capacity < 1) {
      throw Error(ErrorCode::InvalidProfile, "worker " + std::to_string(w.worker_id) + " has capacity " +
                                                 std::to_string(w.capacity));
    }
    if (!ids.insert(w.worker_id).second) {
      throw Error(ErrorCode::InvalidProfile, "worker id " + std::to_string(w.worker_id) + " repeated");
    }
    min_capacity = std::min(min_capacity, w.capacity);
  }
  if (min_capacity != 1) {
    throw Error(ErrorCode::InvalidProfile, "the weakest worker must have capacity 1, got " +
                                               std::to_string(min_capacity));
  }
  std::stable_sort(workers.begin(), workers.end(),
                   [](const PhysicalWorker& x, const PhysicalWorker& y) { return x.capacity > y.capacity; });
  HeterogeneousProfile p;
  p.workers = std::move(workers);
  p.sorted_nonascending = true;
  return p;
}

HeterogeneousProfile HeterogeneousProfile::from_capacities(const std::vector<int>& capacities) {
  std::vector<PhysicalWorker> workers;
  for (std::size_t i = 0; i < capacities.size(); ++i) workers.push_back({static_cast<int>(i), capacities[i]});
  return normalized(std::move(workers));
}

int HeterogeneousProfile::total_capacity() const {
  int total = 0;
  for (const auto& w : workers) total += w.capacity;
  return total;
}

HeterogeneousProfile parse_profile(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("profile: ") + e.what());
  }
  if (!j.is_object() || !j.contains("workers") || !j["workers"].is_array()) {
    throw Error(ErrorCode::ParseError, "profile: expected an object with a \"workers\" array");
  }
  std::vector<PhysicalWorker> workers;
  for (const auto& w : j["workers"]) {
    if (!w.contains("id") || !w.contains("capacity") || !w["id"].is_number_integer() ||
        !w["capacity"].is_number_integer()) {
      throw Error(ErrorCode::ParseError, "profile: each worker needs integer \"id\" and \"capacity\"");
    }
    workers.push_back({w["id"].get<int>(), w["capacity"].get<int>()});
  }
  return HeterogeneousProfile::normalized(std::move(workers));
}

HeterogeneousProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str());
}

std::string profile_to_json(const HeterogeneousProfile& profile) {
  nlohmann::ordered_json j;
  auto workers = nlohmann::ordered_json::array();
  for (const auto& w : profile.workers) workers.push_back({{"id", w.worker_id}, {"capacity", w.capacity}});
  j["workers"] = workers;
  return j.dump(2) + "\n";
}

VirtualMapping virtualize(const HeterogeneousProfile& profile, int k_bar, PlanKind kind) {
  const auto p = profile.sorted_nonascending ? profile : HeterogeneousProfile::normalized(profile.workers);
  const int n_bar = static_cast<int>(p.workers.size());
  if (k_bar < 1 || k_bar > n_bar - 1) {
    throw Error(ErrorCode::InvalidBoundary, "boundary " + std::to_string(k_bar) + " outside [1, " +
                                                std::to_string(n_bar - 1) + "]");
  }
  VirtualMapping m;
  m.kind = kind;
  m.k_bar = k_bar;
  for (int i = 0; i < n_bar; ++i) {
    const auto& w = p.workers[static_cast<std::size_t>(i)];
    m.first_virtual.push_back(m.n_virtual);
    m.capacities.push_back(w.capacity);
    m.physical_ids.push_back(w.worker_id);
    for (int slot = 0; slot < w.capacity; ++slot) m.virtual_to_physical.push_back({i, w.worker_id, slot});
    m.n_virtual += w.capacity;
    if (i < k_bar) m.k += w.capacity;
  }
  m.s = m.n_virtual - m.k;
  return m;
}

void check_mapping(const VirtualMapping& mapping, const EncodingPlan& plan) {
  if (plan.n() != mapping.n_virtual || plan.tau() != mapping.k || plan.kind() != mapping.kind) {
    throw Error(ErrorCode::PlanMismatch, "plan (n=" + std::to_string(plan.n()) + ", tau=" +
                                             std::to_string(plan.tau()) + ") does not fit the virtual system (n=" +
                                             std::to_string(mapping.n_virtual) + ", k=" +
                                             std::to_string(mapping.k) + ")");
  }
}

std::vector<PhysicalTasks> group_tasks(std::vector<WorkerTask> tasks, const VirtualMapping& mapping) {
  if (static_cast<int>(tasks.size()) != mapping.n_virtual) {
    throw Error(ErrorCode::PlanMismatch, "expected one task per virtual worker");
  }
  std::vector<PhysicalTasks> out(static_cast<std::size_t>(mapping.physical_count()));
  for (int i = 0; i < mapping.physical_count(); ++i) {
    auto& p = out[static_cast<std::size_t>(i)];
    p.physical_id = mapping.physical_ids[static_cast<std::size_t>(i)];
    const int first = mapping.first_virtual[static_cast<std::size_t>(i)];
    for (int slot = 0; slot < mapping.capacities[static_cast<std::size_t>(i)]; ++slot) {
      p.tasks.push_back(std::move(tasks[static_cast<std::size_t>(first + slot)]));
    }
  }
  return out;
}

std::vector<PhysicalTasks> assign_hetero_tasks(const SparseMatrix& a, const DenseMatrix& x, const VirtualMapping& mapping,
                                               const EncodingPlan& plan) {
  check_mapping(mapping, plan);
  return group_tasks(encode_tasks(a, x, plan), mapping);
}

std::vector<PhysicalTasks> assign_hetero_tasks(const SparseMatrix& a, const SparseMatrix& b,
                                               const VirtualMapping& mapping, const EncodingPlan& plan) {
  check_mapping(mapping, plan);
  return group_tasks(encode_tasks(a, b, plan), mapping);
}

QDelta q_over_delta(const VirtualMapping& mapping, const EncodingPlan& plan) {
  check_mapping(mapping, plan);
  QDelta r;
  r.delta = plan.tau();
  r.q = mapping.n_virtual - mapping.s;
  r.ratio = static_cast<double>(r.q) / r.delta;
  return r;
}

std::vector<int> prefix_survivors(const VirtualMapping& mapping, const std::vector<int>& completion_counts) {
  if (static_cast<int>(completion_counts.size()) != mapping.physical_count()) {
    throw Error(ErrorCode::InconsistentParams, "one completion count per physical worker is required");
  }
  std::vector<int> ids;
  for (int i = 0; i < mapping.physical_count(); ++i) {
    const int done = completion_counts[static_cast<std::size_t>(i)];
    if (done < 0 || done > mapping.capacities[static_cast<std::size_t>(i)]) {
      throw Error(ErrorCode::InconsistentParams, "physical worker " + std::to_string(i) + " completed " +
                                                     std::to_string(done) + " slots");
    }
    for (int slot = 0; slot < done; ++slot) ids.push_back(mapping.first_virtual[static_cast<std::size_t>(i)] + slot);
  }
  return ids;
}

bool verify_partial_recovery(const VirtualMapping& mapping, const EncodingPlan& plan,
                             const std::vector<int>& completion_counts, double rcond) {
  const auto q = q_over_delta(mapping, plan);
  const auto ids = prefix_survivors(mapping, completion_counts);
  if (static_cast<int>(ids.size()) < q.q) return false;
  return reciprocal_condition(stacked_effective_rows(plan, ids)) > rcond;
}

PrefixAudit audit_prefix_patterns(const VirtualMapping& mapping, const EncodingPlan& plan, int total, double rcond) {
  if (total < 0) total = q_over_delta(mapping, plan).q;
  std::vector<std::vector<int>> patterns;
  std::vector<int> counts(static_cast<std::size_t>(mapping.physical_count()), 0);
  // Depth-first over workers; remaining capacity prunes dead branches.
  std::vector<int> tail_capacity(counts.size() + 1, 0);
  for (int i = mapping.physical_count() - 1; i >= 0; --i) {
    tail_capacity[static_cast<std::size_t>(i)] =
        tail_capacity[static_cast<std::size_t>(i) + 1] + mapping.capacities[static_cast<std::size_t>(i)];
  }
  auto rec = [&](auto&& self, std::size_t i, int left) -> void {
    if (i == counts.size()) {
      if (left == 0) patterns.push_back(counts);
      return;
    }
    if (left > tail_capacity[i]) return;
    for (int c = 0; c <= std::min(left, mapping.capacities[i]); ++c) {
      counts[i] = c;
      self(self, i + 1, left - c);
    }
    counts[i] = 0;
  };
  rec(rec, 0, total);

  std::vector<char> ok(patterns.size(), 0);
  const auto count = static_cast<std::int64_t>(patterns.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t p = 0; p < count; ++p) {
    ok[static_cast<std::size_t>(p)] = verify_partial_recovery(mapping, plan, patterns[static_cast<std::size_t>(p)], rcond);
  }
  PrefixAudit audit;
  audit.patterns = patterns.size();
  for (std::size_t p = 0; p < patterns.size(); ++p) {
    if (!ok[p]) {
      ++audit.failures;
      audit.failing_patterns.push_back(patterns[p]);
    }
  }
  return audit;
}

}  // namespace scc
