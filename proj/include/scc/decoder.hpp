#pragma once

#include <span>
#include <utility>
#include <vector>

#include "scc/matrix.hpp"
#include "scc/plan.hpp"

namespace scc {

/// The tau x tau system linking survivor results to the unknown blocks.
/// Column j is unknown (u, v) with j = u * k_B + v; matvec plans have v = 0.
struct DecodingSystem {
  int tau = 0;
  DenseMatrix matrix;
  std::vector<std::pair<int, int>> unknown_index_map;
  std::vector<int> survivor_ids;
};

struct WorkerResult {
  int worker_id = 0;
  DenseMatrix value;
};

constexpr double kDefaultRcond = 1e-12;

/// Length-tau coefficient row of one worker: R_A[i] for matvec, the
/// Kronecker product R_A[i] (x) R_B[i] for matmat.
std::vector<double> effective_row(const EncodingPlan& plan, int worker_id);

DecodingSystem build_decoding_system(const EncodingPlan& plan, std::span<const int> survivor_ids);

/// sigma_min / sigma_max of any dense matrix (rectangular allowed); 0 for an
/// empty or all-zero matrix.
double reciprocal_condition(const DenseMatrix& m);

/// Rows of `worker_ids` stacked, any count.
DenseMatrix stacked_effective_rows(const EncodingPlan& plan, std::span<const int> worker_ids);

bool is_recoverable(const EncodingPlan& plan, std::span<const int> survivor_ids, double rcond = kDefaultRcond);

/// Solves for every unknown block from exactly tau results (aligned with
/// `survivor_ids`) and reassembles A^T x or A^T B, stripping padding and
/// undoing operand normalization.
DenseMatrix decode(const EncodingPlan& plan, std::span<const int> survivor_ids, std::span<const DenseMatrix> results,
                   double rcond = kDefaultRcond);

/// Least-squares decode from tau or more results.
DenseMatrix decode_least_squares(const EncodingPlan& plan, std::span<const WorkerResult> available,
                                 double rcond = kDefaultRcond);

/// Places solved unknown blocks (row j = unknown j flattened row-major) into
/// the final product.
DenseMatrix assemble_product(const EncodingPlan& plan, const DenseMatrix& unknowns, index_t block_rows,
                             index_t block_cols);

}  // namespace scc
