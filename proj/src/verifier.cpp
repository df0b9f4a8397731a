#include "scc/verifier.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "scc/error.hpp"
#include "scc/format.hpp"
#include "scc/stability.hpp"

namespace scc {

namespace {

void require_matmat(const EncodingPlan& plan) {
  if (plan.kind() != PlanKind::matmat) throw Error(ErrorCode::PlanMismatch, "class bounds need a matmat plan");
}

int class_size(const EncodingPlan& plan, int class_id) {
  // Workers class_id, class_id + k_A, ... below n.
  return (plan.n() - 1 - class_id) / plan.k_a() + 1;
}

std::vector<int> unknowns_of(const EncodingPlan& plan, int worker) {
  std::vector<int> out;
  for (int u : plan.supports_a()[static_cast<std::size_t>(worker)]) {
    for (int v : plan.supports_b()[static_cast<std::size_t>(worker)]) out.push_back(u * plan.k_b() + v);
  }
  return out;
}

}  // namespace

BipartiteGraph support_bipartite_graph(const EncodingPlan& plan, const std::vector<int>& worker_subset) {
  BipartiteGraph g;
  g.left_size = static_cast<int>(worker_subset.size());
  g.right_size = plan.tau();
  g.left_ids = worker_subset;
  for (int w : worker_subset) {
    if (w < 0 || w >= plan.n()) throw Error(ErrorCode::InvalidWorker, "worker " + std::to_string(w));
    g.adjacency.push_back(unknowns_of(plan, w));
  }
  return g;
}

int maximum_matching(const BipartiteGraph& g) {
  constexpr int kFree = -1;
  constexpr int kInf = std::numeric_limits<int>::max();
  std::vector<int> match_left(static_cast<std::size_t>(g.left_size), kFree);
  std::vector<int> match_right(static_cast<std::size_t>(g.right_size), kFree);
  std::vector<int> dist(static_cast<std::size_t>(g.left_size));

  // BFS layers from free left vertices; true if some augmenting path exists.
  auto bfs = [&]() {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < g.left_size; ++u) {
      if (match_left[u] == kFree) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = kInf;
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : g.adjacency[u]) {
        const int w = match_right[v];
        if (w == kFree) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };

  auto dfs = [&](auto&& self, int u) -> bool {
    for (int v : g.adjacency[u]) {
      const int w = match_right[v];
      if (w == kFree || (dist[w] == dist[u] + 1 && self(self, w))) {
        match_left[u] = v;
        match_right[v] = u;
        return true;
      }
    }
    dist[u] = kInf;
    return false;
  };

  int size = 0;
  while (bfs()) {
    for (int u = 0; u < g.left_size; ++u) {
      if (match_left[u] == kFree && dfs(dfs, u)) ++size;
    }
  }
  return size;
}

bool has_perfect_matching(const BipartiteGraph& g) {
  if (g.left_size != g.right_size) {
    throw Error(ErrorCode::SideSizeMismatch, std::to_string(g.left_size) + " equations vs " +
                                                 std::to_string(g.right_size) + " unknowns");
  }
  return maximum_matching(g) == g.left_size;
}

UnionBound min_participating_unknowns_union(const EncodingPlan& plan, const std::vector<int>& class_subset) {
  require_matmat(plan);
  const std::set<int> classes(class_subset.begin(), class_subset.end());
  const int q = static_cast<int>(classes.size());
  if (q != static_cast<int>(class_subset.size()) || q == 0) {
    throw Error(ErrorCode::InconsistentParams, "class subset must be non-empty and distinct");
  }
  if (q > plan.k_a() - plan.omega_a() + 1) {
    throw Error(ErrorCode::TooManyClasses, std::to_string(q) + " classes, at most " +
                                               std::to_string(plan.k_a() - plan.omega_a() + 1) + " allowed");
  }
  std::set<int> blocks;
  for (int c : classes) {
    if (c < 0 || c >= plan.k_a()) throw Error(ErrorCode::InconsistentParams, "class " + std::to_string(c));
    // Every worker of class c carries the same A support as worker c.
    for (int u : plan.supports_a()[static_cast<std::size_t>(c)]) blocks.insert(u);
  }
  return {static_cast<int>(blocks.size()), plan.omega_a() + q - 1};
}

int rho_bound(const EncodingPlan& plan, int class_id, int delta, ClassPosition position) {
  require_matmat(plan);
  if (class_id < 0 || class_id >= plan.k_a()) throw Error(ErrorCode::InconsistentParams, "class " + std::to_string(class_id));
  const int size = class_size(plan, class_id);
  if (delta < 1 || delta > size) {
    throw Error(ErrorCode::DeltaOutOfRange, "delta " + std::to_string(delta) + " outside [1, " +
                                                std::to_string(size) + "]");
  }
  const int wa = plan.omega_a();
  const int wb = plan.omega_b();
  const int kb = plan.k_b();
  int b_blocks;
  if (delta == 1) {
    b_blocks = wb;
  } else if (size <= kb) {
    b_blocks = std::min(wb + delta - 1, kb);
  } else {
    // k_B + 1 members: the first and last share a B window.
    b_blocks = std::min(wb + delta - 2, kb);
  }
  return position == ClassPosition::first ? wa * b_blocks : b_blocks;
}

HallBound rearranged_hall_bound(const EncodingPlan& plan, const std::vector<int>& worker_subset) {
  require_matmat(plan);
  HallBound h;
  h.m = static_cast<int>(worker_subset.size());
  if (h.m > plan.tau()) {
    throw Error(ErrorCode::SubsetTooLarge, std::to_string(h.m) + " workers > tau = " + std::to_string(plan.tau()));
  }
  const int ka = plan.k_a();
  std::vector<int> delta(static_cast<std::size_t>(ka), 0);
  std::set<int> neighborhood;
  std::set<int> seen;
  for (int w : worker_subset) {
    if (w < 0 || w >= plan.n()) throw Error(ErrorCode::InvalidWorker, "worker " + std::to_string(w));
    if (!seen.insert(w).second) throw Error(ErrorCode::InconsistentParams, "worker " + std::to_string(w) + " repeated");
    ++delta[static_cast<std::size_t>(w % ka)];
    for (int j : unknowns_of(plan, w)) neighborhood.insert(j);
  }
  h.exact_neighborhood = static_cast<int>(neighborhood.size());

  h.class_order.resize(static_cast<std::size_t>(ka));
  std::iota(h.class_order.begin(), h.class_order.end(), 0);
  std::sort(h.class_order.begin(), h.class_order.end(), [&](int x, int y) {
    if (delta[x] != delta[y]) return delta[x] > delta[y];
    const int sx = class_size(plan, x);
    const int sy = class_size(plan, y);
    if (sx != sy) return sx < sy;
    return x < y;
  });
  for (int c : h.class_order) h.deltas.push_back(delta[static_cast<std::size_t>(c)]);

  // Positions past k_A - omega_A contribute the trivial bound zero.
  const int last = ka - plan.omega_a();
  for (int i = 0; i <= last && i < ka; ++i) {
    const int d = h.deltas[static_cast<std::size_t>(i)];
    if (d == 0) break;
    h.lower_bound += rho_bound(plan, h.class_order[static_cast<std::size_t>(i)], d,
                               i == 0 ? ClassPosition::first : ClassPosition::later);
  }
  return h;
}

RankAudit exhaustive_rank_audit(const EncodingPlan& plan, const AuditOptions& options) {
  const int n = plan.n();
  const int s = plan.s();
  const double total = binomial(n, s);
  if (total > static_cast<double>(options.budget)) {
    throw Error(ErrorCode::BudgetExceeded, "C(" + std::to_string(n) + ", " + std::to_string(s) +
                                               ") subsets exceed the budget of " + std::to_string(options.budget));
  }
  const auto count = static_cast<std::int64_t>(total);
  std::vector<AuditRow> rows(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t r = 0; r < count; ++r) {
    const auto stragglers = unrank_combination(n, s, static_cast<std::uint64_t>(r));
    auto& row = rows[static_cast<std::size_t>(r)];
    std::size_t next = 0;
    for (int w = 0; w < n; ++w) {
      if (next < stragglers.size() && stragglers[next] == w) {
        ++next;
      } else {
        row.survivors.push_back(w);
      }
    }
    row.rcond = reciprocal_condition(build_decoding_system(plan, row.survivors).matrix);
    row.pass = row.rcond > options.rcond;
    row.matched = options.check_matching && has_perfect_matching(support_bipartite_graph(plan, row.survivors));
  }
  RankAudit audit;
  audit.subsets_tested = static_cast<std::uint64_t>(count);
  for (const auto& row : rows) {
    if (!row.pass) ++audit.failures;
    if (options.check_matching && !row.matched) ++audit.matching_failures;
  }
  if (options.keep_rows) audit.rows = std::move(rows);
  return audit;
}

std::string audit_csv(const RankAudit& audit) {
  std::ostringstream out;
  out << "subset,matched,rcond,pass\n";
  for (const auto& row : audit.rows) {
    out << join_ints(row.survivors) << ',' << (row.matched ? 1 : 0) << ',' << shortest(row.rcond) << ','
        << (row.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<int> random_subset(int n, int k, std::mt19937_64& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

Agreement matching_rank_agreement(const EncodingPlan& plan, std::uint64_t trials, std::uint64_t seed, double rcond) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> subsets;
  subsets.reserve(trials);
  for (std::uint64_t t = 0; t < trials; ++t) subsets.push_back(random_subset(plan.n(), plan.tau(), rng));

  std::vector<char> matched(trials), ranked(trials);
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t t = 0; t < count; ++t) {
    const auto& sub = subsets[static_cast<std::size_t>(t)];
    matched[static_cast<std::size_t>(t)] = has_perfect_matching(support_bipartite_graph(plan, sub));
    ranked[static_cast<std::size_t>(t)] = is_recoverable(plan, sub, rcond);
  }
  Agreement a;
  a.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (matched[t] == ranked[t]) {
      ++a.agree;
    } else if (matched[t]) {
      ++a.matching_without_rank;
    } else {
      ++a.rank_without_matching;
    }
  }
  a.rate = trials ? static_cast<double>(a.agree) / static_cast<double>(trials) : 1.0;
  return a;
}

Lemma1Audit lemma1_audit(const EncodingPlan& plan, std::uint64_t exhaustive_limit, std::uint64_t samples,
                         std::uint64_t seed) {
  require_matmat(plan);
  Lemma1Audit audit;
  std::mt19937_64 rng(seed);
  for (int m = 1; m <= plan.tau(); ++m) {
    std::vector<std::vector<int>> subsets;
    const double total = binomial(plan.n(), m);
    if (total <= static_cast<double>(exhaustive_limit)) {
      ++audit.exhaustive_sizes;
      for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(total); ++r) {
        subsets.push_back(unrank_combination(plan.n(), m, r));
      }
    } else {
      ++audit.sampled_sizes;
      for (std::uint64_t t = 0; t < samples; ++t) subsets.push_back(random_subset(plan.n(), m, rng));
    }
    std::uint64_t below_bound = 0;
    std::uint64_t below_m = 0;
    const auto count = static_cast<std::int64_t>(subsets.size());
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : below_bound, below_m)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto h = rearranged_hall_bound(plan, subsets[static_cast<std::size_t>(i)]);
      if (!h.exact_ge_bound()) ++below_bound;
      if (!h.bound_ge_m()) ++below_m;
    }
    audit.subsets += subsets.size();
    audit.exact_below_bound += below_bound;
    audit.bound_below_m += below_m;
  }
  return audit;
}

std::string lemma1_csv(const Lemma1Audit& audit) {
  std::ostringstream out;
  out << "subsets,exhaustive_sizes,sampled_sizes,exact_below_bound,bound_below_m\n";
  out << audit.subsets << ',' << audit.exhaustive_sizes << ',' << audit.sampled_sizes << ','
      << audit.exact_below_bound << ',' << audit.bound_below_m << '\n';
  return out.str();
}

}  // namespace scc
