#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scc/decoder.hpp"
#include "scc/plan.hpp"

namespace scc {

/// Left vertices are equations (one per listed worker), right vertices the
/// tau unknowns.
struct BipartiteGraph {
  int left_size = 0;
  int right_size = 0;
  std::vector<std::vector<int>> adjacency;
  std::vector<int> left_ids;
};

BipartiteGraph support_bipartite_graph(const EncodingPlan& plan, const std::vector<int>& worker_subset);

/// Hopcroft-Karp maximum matching size.
int maximum_matching(const BipartiteGraph& g);

/// Throws SideSizeMismatch unless both sides have the same size.
bool has_perfect_matching(const BipartiteGraph& g);

struct UnionBound {
  int exact = 0;
  int bound = 0;
};

/// |union of D^A_i over the chosen classes| against omega_A + q - 1.
/// Throws TooManyClasses when q > k_A - omega_A + 1.
UnionBound min_participating_unknowns_union(const EncodingPlan& plan, const std::vector<int>& class_subset);

enum class ClassPosition { first, later };

/// Fewest unknowns touched by delta workers of one class (first position) or
/// fewest additional ones (later positions). Throws DeltaOutOfRange unless
/// 1 <= delta <= |M_class|.
int rho_bound(const EncodingPlan& plan, int class_id, int delta, ClassPosition position);

struct HallBound {
  int m = 0;
  int lower_bound = 0;
  int exact_neighborhood = 0;
  std::vector<int> class_order;  // classes after rearrangement
  std::vector<int> deltas;       // per class, in class_order

  bool exact_ge_bound() const { return exact_neighborhood >= lower_bound; }
  bool bound_ge_m() const { return lower_bound >= m; }
};

/// Rearranges classes by (delta descending, smaller class first, class id)
/// and sums rho over the first k_A - omega_A + 1 of them. Throws
/// SubsetTooLarge when m > tau.
HallBound rearranged_hall_bound(const EncodingPlan& plan, const std::vector<int>& worker_subset);

struct AuditRow {
  std::vector<int> survivors;
  bool matched = false;
  double rcond = 0.0;
  bool pass = false;
};

struct RankAudit {
  std::uint64_t subsets_tested = 0;
  std::uint64_t failures = 0;
  std::uint64_t matching_failures = 0;
  std::vector<AuditRow> rows;  // only when requested
};

struct AuditOptions {
  std::uint64_t budget = 1'000'000;
  double rcond = kDefaultRcond;
  bool check_matching = true;
  bool keep_rows = false;
};

/// is_recoverable on every tau-subset, in lexicographic order of the
/// straggler sets. Throws BudgetExceeded when C(n, s) > budget.
RankAudit exhaustive_rank_audit(const EncodingPlan& plan, const AuditOptions& options = {});

std::string audit_csv(const RankAudit& audit);

struct Agreement {
  std::uint64_t trials = 0;
  std::uint64_t agree = 0;
  std::uint64_t matching_without_rank = 0;  // would contradict the generic-rank argument
  std::uint64_t rank_without_matching = 0;  // impossible with structural zeros
  double rate = 1.0;
};

Agreement matching_rank_agreement(const EncodingPlan& plan, std::uint64_t trials, std::uint64_t seed,
                                  double rcond = kDefaultRcond);

struct Lemma1Audit {
  std::uint64_t subsets = 0;
  std::uint64_t exact_below_bound = 0;
  std::uint64_t bound_below_m = 0;
  std::uint64_t exhaustive_sizes = 0;
  std::uint64_t sampled_sizes = 0;

  std::uint64_t violations() const { return exact_below_bound + bound_below_m; }
};

/// For every m in 1..tau: all m-subsets when C(n, m) <= exhaustive_limit,
/// otherwise `samples` random ones.
Lemma1Audit lemma1_audit(const EncodingPlan& plan, std::uint64_t exhaustive_limit = 100'000,
                         std::uint64_t samples = 10'000, std::uint64_t seed = 0);

std::string lemma1_csv(const Lemma1Audit& audit);

/// Uniform k-subset of [0, n), sorted.
std::vector<int> random_subset(int n, int k, std::mt19937_64& rng);

}  // namespace scc
