#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scc/matrix.hpp"

namespace scc {

enum class PlanKind { matvec, matmat };

std::string_view to_string(PlanKind kind);
PlanKind parse_plan_kind(std::string_view text);

/// Distribution of the nonzero encoding coefficients. Accepts the spellings
/// "normal(mean,stddev)", "uniform(lb,ub)" and the shorthands "rand(c,d)" /
/// "unifrand(lb,ub)".
struct Distribution {
  enum class Family { normal, uniform };

  Family family = Family::normal;
  double first = 0.0;   // mean or lower bound
  double second = 1.0;  // standard deviation or upper bound

  static Distribution normal(double mean, double stddev);
  static Distribution uniform(double lower, double upper);
  static Distribution parse(std::string_view text);

  std::string to_string() const;
  /// Never returns exactly zero, and never the lower endpoint of a uniform.
  double sample(std::mt19937_64& rng) const;

  friend bool operator==(const Distribution&, const Distribution&) = default;
};

/// The n x k_A and n x k_B coefficient matrices R_A and R_B. Entries outside
/// a worker's support are structural zeros.
struct CoefficientSet {
  DenseMatrix a;
  DenseMatrix b;
};

using Support = std::vector<int>;

/// All parameters of one coded computation. Operand roles are normalized:
/// for matmat the operand partitioned into k_a blocks is the one with more
/// blocks; when that is the caller's B, `transposed()` is set and the
/// product is assembled as (B^T A)^T.
class EncodingPlan {
 public:
  struct Parts {
    PlanKind kind = PlanKind::matvec;
    std::string scheme = "cyclic";
    int n = 0;
    int k_a = 1;
    int k_b = 1;
    int s = 0;
    int omega_a = 1;
    int omega_b = 1;
    bool transposed = false;
    std::uint64_t seed = 0;
    Distribution distribution;
    std::vector<Support> supports_a;
    std::vector<Support> supports_b;
    CoefficientSet coeffs;
    index_t source_cols_a = 0;
    index_t source_cols_b = 0;
  };

  /// Checks the structural invariants (support sizes, coefficient pattern,
  /// n = tau + s) but not the matmat weight inequalities.
  explicit EncodingPlan(Parts parts);

  PlanKind kind() const noexcept { return p_.kind; }
  const std::string& scheme() const noexcept { return p_.scheme; }
  int n() const noexcept { return p_.n; }
  int k_a() const noexcept { return p_.k_a; }
  int k_b() const noexcept { return p_.k_b; }
  int s() const noexcept { return p_.s; }
  int omega_a() const noexcept { return p_.omega_a; }
  int omega_b() const noexcept { return p_.omega_b; }
  int tau() const noexcept { return p_.k_a * p_.k_b; }
  bool transposed() const noexcept { return p_.transposed; }
  std::uint64_t seed() const noexcept { return p_.seed; }
  const Distribution& distribution() const noexcept { return p_.distribution; }
  const std::vector<Support>& supports_a() const noexcept { return p_.supports_a; }
  const std::vector<Support>& supports_b() const noexcept { return p_.supports_b; }
  const DenseMatrix& coeffs_a() const noexcept { return p_.coeffs.a; }
  const DenseMatrix& coeffs_b() const noexcept { return p_.coeffs.b; }
  /// Unpadded widths of the normalized operands; 0 when unknown.
  index_t source_cols_a() const noexcept { return p_.source_cols_a; }
  index_t source_cols_b() const noexcept { return p_.source_cols_b; }
  const Parts& parts() const noexcept { return p_; }

  EncodingPlan with_coefficients(CoefficientSet coeffs) const;
  EncodingPlan with_coefficients(CoefficientSet coeffs, std::uint64_t seed, const Distribution& dist) const;
  /// Records unpadded operand widths, given in the caller's (A, B) order.
  EncodingPlan with_source_widths(index_t cols_a, index_t cols_b) const;

 private:
  Parts p_;
};

/// Cyclic matrix-vector plan: omega_A = min(s+1, k_A), T_i = {i, ..., i+omega_A-1} mod k_A.
EncodingPlan plan_matvec(int n, int k_a, int s, const Distribution& dist = {}, std::uint64_t seed = 0);

enum class WeightCheck { enforce, skip };

/// Cyclic matrix-matrix plan. T_i cyclic in i mod k_A; S_i starts at
/// floor(i / k_A) mod k_B. With WeightCheck::skip the inequalities on the
/// weights are not enforced, which is only useful for building
/// counterexamples.
EncodingPlan plan_matmat(int n, int k_a, int k_b, int s, int omega_a, int omega_b,
                         const Distribution& dist = {}, std::uint64_t seed = 0,
                         WeightCheck check = WeightCheck::enforce);

/// Smallest-product (omega_A, omega_B) with omega_A >= omega_B, omega_A omega_B > s
/// and 1 < omega < k; ties go to the smaller omega_B.
std::pair<int, int> choose_matmat_weights(int k_a, int k_b, int s);

/// Full-support random code (omega = k), the dense stand-in for MDS-style schemes.
EncodingPlan plan_dense_baseline(PlanKind kind, int n, int k_a, int k_b, int s,
                                 const Distribution& dist = {}, std::uint64_t seed = 0);

/// Fresh i.i.d. draws at every support position of `plan`. Matvec plans get
/// an all-ones R_B column.
CoefficientSet sample_coefficients(const EncodingPlan& plan, const Distribution& dist, std::uint64_t seed);

/// M_i = { j : j = i mod k_A } for a matmat plan.
std::vector<std::vector<int>> class_structure(const EncodingPlan& plan);

std::string plan_to_json(const EncodingPlan& plan);
EncodingPlan plan_from_json(std::string_view text);
void save_plan(const EncodingPlan& plan, const std::filesystem::path& path);
EncodingPlan load_plan(const std::filesystem::path& path);

}  // namespace scc
