#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace scc {

using index_t = std::int64_t;

/// Row-major dense matrix of doubles. Vectors are n x 1 matrices.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(index_t rows, index_t cols, double fill = 0.0);
  DenseMatrix(index_t rows, index_t cols, std::vector<double> values);

  static DenseMatrix identity(index_t n);

  index_t rows() const noexcept { return rows_; }
  index_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(index_t r, index_t c) { return values_[static_cast<std::size_t>(r * cols_ + c)]; }
  double operator()(index_t r, index_t c) const { return values_[static_cast<std::size_t>(r * cols_ + c)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(index_t r) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(r * cols_),
                                                    static_cast<std::size_t>(cols_));
  }

  DenseMatrix transposed() const;
  double frobenius_norm() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<double> values_;
};

/// ||a - b||_F / ||b||_F; absolute error when b is zero.
double relative_frobenius_error(const DenseMatrix& a, const DenseMatrix& b);

struct Triplet {
  index_t row;
  index_t col;
  double value;
};

/// Compressed sparse row matrix with sorted, unique column indices and no
/// stored zeros.
class SparseMatrix {
 public:
  SparseMatrix() : row_offsets_(1, 0) {}
  SparseMatrix(index_t rows, index_t cols);

  /// Takes ownership of CSR arrays. Validates the structure, then drops any
  /// explicit zeros. Column indices must already be strictly increasing per
  /// row.
  SparseMatrix(index_t rows, index_t cols, std::vector<index_t> row_offsets,
               std::vector<index_t> col_indices, std::vector<double> values);

  /// Builds from unordered triplets; duplicates are summed and exact zeros dropped.
  static SparseMatrix from_triplets(index_t rows, index_t cols, std::vector<Triplet> triplets);
  static SparseMatrix from_dense(const DenseMatrix& dense);

  index_t rows() const noexcept { return rows_; }
  index_t cols() const noexcept { return cols_; }
  index_t nnz() const noexcept { return static_cast<index_t>(values_.size()); }
  double density() const noexcept;

  std::span<const index_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const index_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const index_t> row_cols(index_t r) const {
    return std::span<const index_t>(col_indices_)
        .subspan(static_cast<std::size_t>(row_offsets_[r]),
                 static_cast<std::size_t>(row_offsets_[r + 1] - row_offsets_[r]));
  }
  std::span<const double> row_values(index_t r) const {
    return std::span<const double>(values_).subspan(
        static_cast<std::size_t>(row_offsets_[r]),
        static_cast<std::size_t>(row_offsets_[r + 1] - row_offsets_[r]));
  }

  DenseMatrix to_dense() const;
  SparseMatrix transposed() const;
  SparseMatrix scaled(double alpha) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  void validate() const;
  void drop_zeros();

  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<index_t> row_offsets_;
  std::vector<index_t> col_indices_;
  std::vector<double> values_;
};

struct BlockColumnPartition {
  index_t parent_cols = 0;
  index_t k = 1;
  index_t block_width = 0;

  /// Throws NonDivisibleWidth unless k divides parent_cols.
  static BlockColumnPartition make(index_t parent_cols, index_t k);
};

/// Splits A into k equal-width block-columns A_0 .. A_{k-1}.
std::vector<SparseMatrix> partition_block_columns(const SparseMatrix& a, index_t k);

/// Horizontal concatenation; inverse of partition_block_columns.
SparseMatrix concat_block_columns(std::span<const SparseMatrix> blocks);

/// Appends the fewest zero columns making cols divisible by k.
SparseMatrix pad_columns(const SparseMatrix& a, index_t k);

/// Each entry nonzero independently with probability `density`; values are
/// standard normal. Deterministic under seed.
SparseMatrix generate_random_sparse(index_t rows, index_t cols, double density, std::uint64_t seed);

DenseMatrix generate_random_dense(index_t rows, index_t cols, std::uint64_t seed);

/// sum_q coeffs[q] * blocks[q]; exact cancellations are not stored.
SparseMatrix sparse_linear_combination(std::span<const SparseMatrix> blocks,
                                       std::span<const double> coeffs);

/// A^T x for a column vector x with x.rows() == A.rows().
DenseMatrix spmv_transpose(const SparseMatrix& a, const DenseMatrix& x);

struct ProductResult {
  DenseMatrix value;
  /// Scalar multiply-accumulates performed; the worker compute proxy.
  std::uint64_t flops = 0;
};

/// Dense A^T B with the multiply-accumulate count.
ProductResult spgemm_transpose(const SparseMatrix& a, const SparseMatrix& b);

/// 1 - (1 - density)^weight.
double predicted_encoded_density(double density, int weight);

}  // namespace scc
