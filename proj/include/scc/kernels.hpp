#pragma once

// Two implementations of every data-parallel kernel. `serial` is the
// reference the tests compare against; `omp` is what the public entry points
// in matrix.hpp dispatch to when the library is built with OpenMP. Without
// OpenMP the omp variants fall back to running on one thread.

#include <span>

#include "scc/matrix.hpp"

namespace scc::kernels {

namespace serial {

DenseMatrix spmv_transpose(const SparseMatrix& a, const DenseMatrix& x);

/// Outer-product formulation: for each shared row k, scatter
/// row_k(A)^T row_k(B) into the dense result.
ProductResult spgemm_transpose(const SparseMatrix& a, const SparseMatrix& b);

SparseMatrix linear_combination(std::span<const SparseMatrix> blocks, std::span<const double> coeffs);

}  // namespace serial

namespace omp {

/// Per-thread accumulators reduced at the end.
DenseMatrix spmv_transpose(const SparseMatrix& a, const DenseMatrix& x);

/// Row-parallel Gustavson product on the explicit transpose of A; output rows
/// are owned by one thread each.
ProductResult spgemm_transpose(const SparseMatrix& a, const SparseMatrix& b);

/// Two passes over rows (count, then fill) so each row is written by one thread.
SparseMatrix linear_combination(std::span<const SparseMatrix> blocks, std::span<const double> coeffs);

}  // namespace omp

/// Threads the omp variants use (1 without OpenMP).
int max_threads();
void set_num_threads(int threads);

}  // namespace scc::kernels
