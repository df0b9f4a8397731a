#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "scc/matrix.hpp"
#include "scc/plan.hpp"

namespace scc {

/// What one (virtual) worker receives. For matmat plans `encoded_a` is the
/// encoded block of the normalized first operand (the caller's B when the
/// plan is transposed).
struct WorkerTask {
  int worker_id = 0;
  SparseMatrix encoded_a;
  std::optional<SparseMatrix> encoded_b;
  std::shared_ptr<const DenseMatrix> vector_x;

  /// Stored nonzeros shipped to the worker (the vector x is not counted).
  index_t transmitted_nnz() const { return encoded_a.nnz() + (encoded_b ? encoded_b->nnz() : 0); }
};

/// Matvec encoding. A.cols() must be divisible by k_A.
std::vector<WorkerTask> encode_tasks(const SparseMatrix& a, const DenseMatrix& x, const EncodingPlan& plan);

/// Matmat encoding. Column counts must be divisible by the block counts of
/// their (normalized) roles.
std::vector<WorkerTask> encode_tasks(const SparseMatrix& a, const SparseMatrix& b, const EncodingPlan& plan);

/// Encodes one worker's block from pre-partitioned operand blocks.
SparseMatrix encode_block(std::span<const SparseMatrix> blocks, const Support& support, const DenseMatrix& coeffs,
                          int worker);

}  // namespace scc
