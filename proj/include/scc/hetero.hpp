#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scc/decoder.hpp"
#include "scc/encode.hpp"
#include "scc/plan.hpp"

namespace scc {

struct PhysicalWorker {
  int worker_id = 0;
  int capacity = 1;  // how many unit tasks this worker does in the time a weakest worker does one
};

/// Physical workers, stably sorted by capacity (largest first) once
/// normalized. The weakest worker must have capacity exactly 1.
struct HeterogeneousProfile {
  std::vector<PhysicalWorker> workers;
  bool sorted_nonascending = false;

  /// Throws InvalidProfile on an empty list, a capacity below 1, a minimum
  /// other than 1 or a repeated worker id.
  static HeterogeneousProfile normalized(std::vector<PhysicalWorker> workers);
  static HeterogeneousProfile from_capacities(const std::vector<int>& capacities);

  int total_capacity() const;
};

/// {"workers": [{"id": 0, "capacity": 2}, ...]}
HeterogeneousProfile parse_profile(std::string_view json_text);
HeterogeneousProfile load_profile(const std::filesystem::path& path);
std::string profile_to_json(const HeterogeneousProfile& profile);

struct VirtualSlot {
  int physical_index = 0;  // position in the normalized profile
  int physical_id = 0;
  int slot = 0;            // computation order within the physical worker
};

struct VirtualMapping {
  int n_virtual = 0;
  int k = 0;  // tau of the virtual system: k_A, or k_A k_B for matmat
  int s = 0;
  int k_bar = 0;
  PlanKind kind = PlanKind::matvec;
  std::vector<VirtualSlot> virtual_to_physical;
  std::vector<int> first_virtual;  // per physical index
  std::vector<int> capacities;     // per physical index
  std::vector<int> physical_ids;   // per physical index

  int physical_count() const { return static_cast<int>(capacities.size()); }
};

/// The first k_bar workers of the normalized profile carry the k unknowns,
/// the rest the straggler budget s. Throws InvalidBoundary unless
/// 1 <= k_bar <= n_bar - 1.
VirtualMapping virtualize(const HeterogeneousProfile& profile, int k_bar, PlanKind kind = PlanKind::matvec);

/// One physical worker's encoded tasks in slot order.
struct PhysicalTasks {
  int physical_id = 0;
  std::vector<WorkerTask> tasks;
};

/// Throws PlanMismatch when the plan was not built on the virtual system.
void check_mapping(const VirtualMapping& mapping, const EncodingPlan& plan);

std::vector<PhysicalTasks> group_tasks(std::vector<WorkerTask> tasks, const VirtualMapping& mapping);
std::vector<PhysicalTasks> assign_hetero_tasks(const SparseMatrix& a, const DenseMatrix& x, const VirtualMapping& mapping,
                                               const EncodingPlan& plan);
std::vector<PhysicalTasks> assign_hetero_tasks(const SparseMatrix& a, const SparseMatrix& b,
                                               const VirtualMapping& mapping, const EncodingPlan& plan);

struct QDelta {
  int q = 0;
  int delta = 0;
  double ratio = 1.0;
};

QDelta q_over_delta(const VirtualMapping& mapping, const EncodingPlan& plan);

/// Virtual ids finished when physical worker i completed its first
/// completion_counts[i] slots.
std::vector<int> prefix_survivors(const VirtualMapping& mapping, const std::vector<int>& completion_counts);

bool verify_partial_recovery(const VirtualMapping& mapping, const EncodingPlan& plan,
                             const std::vector<int>& completion_counts, double rcond = kDefaultRcond);

struct PrefixAudit {
  std::uint64_t patterns = 0;
  std::uint64_t failures = 0;
  std::vector<std::vector<int>> failing_patterns;
};

/// Every order-respecting completion pattern with sum(counts) == total
/// (defaults to Q), each checked with verify_partial_recovery.
PrefixAudit audit_prefix_patterns(const VirtualMapping& mapping, const EncodingPlan& plan, int total = -1,
                                  double rcond = kDefaultRcond);

}  // namespace scc
