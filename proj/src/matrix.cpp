#include "scc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "scc/error.hpp"
#include "scc/kernels.hpp"

namespace scc {

DenseMatrix::DenseMatrix(index_t rows, index_t cols, double fill)
    : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows * cols), fill) {
  if (rows < 0 || cols < 0) {
    throw Error(ErrorCode::ShapeMismatch, "negative dense dimensions");
  }
}

DenseMatrix::DenseMatrix(index_t rows, index_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows < 0 || cols < 0 || values_.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorCode::ShapeMismatch, "dense value count does not match " + std::to_string(rows) +
                                              "x" + std::to_string(cols));
  }
}

DenseMatrix DenseMatrix::identity(index_t n) {
  DenseMatrix m(n, n);
  for (index_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (index_t r = 0; r < rows_; ++r)
    for (index_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

double relative_frobenius_error(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "cannot compare matrices of different shapes");
  }
  double diff = 0.0;
  double ref = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    diff += (av[i] - bv[i]) * (av[i] - bv[i]);
    ref += bv[i] * bv[i];
  }
  return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

// ---------------------------------------------------------------------------
// SparseMatrix
// ---------------------------------------------------------------------------

SparseMatrix::SparseMatrix(index_t rows, index_t cols)
    : rows_(rows), cols_(cols), row_offsets_(static_cast<std::size_t>(rows + 1), 0) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::ShapeMismatch, "negative sparse dimensions");
}

SparseMatrix::SparseMatrix(index_t rows, index_t cols, std::vector<index_t> row_offsets,
                           std::vector<index_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  validate();
  drop_zeros();
}

void SparseMatrix::validate() const {
  if (rows_ < 0 || cols_ < 0) throw Error(ErrorCode::ShapeMismatch, "negative sparse dimensions");
  if (row_offsets_.size() != static_cast<std::size_t>(rows_ + 1) || row_offsets_.front() != 0) {
    throw Error(ErrorCode::ShapeMismatch, "row_offsets must have rows+1 entries starting at 0");
  }
  if (col_indices_.size() != values_.size() ||
      row_offsets_.back() != static_cast<index_t>(values_.size())) {
    throw Error(ErrorCode::ShapeMismatch, "row_offsets[rows] must equal nnz");
  }
  for (index_t r = 0; r < rows_; ++r) {
    if (row_offsets_[r + 1] < row_offsets_[r]) {
      throw Error(ErrorCode::ShapeMismatch, "row_offsets must be non-decreasing");
    }
    for (index_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      index_t c = col_indices_[p];
      if (c < 0 || c >= cols_) throw Error(ErrorCode::ShapeMismatch, "column index out of range");
      if (p > row_offsets_[r] && col_indices_[p - 1] >= c) {
        throw Error(ErrorCode::ShapeMismatch, "column indices must be strictly increasing in a row");
      }
    }
  }
}

void SparseMatrix::drop_zeros() {
  if (std::none_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; })) return;
  index_t out = 0;
  index_t start = 0;
  for (index_t r = 0; r < rows_; ++r) {
    index_t end = row_offsets_[r + 1];
    for (index_t p = start; p < end; ++p) {
      if (values_[p] != 0.0) {
        col_indices_[out] = col_indices_[p];
        values_[out] = values_[p];
        ++out;
      }
    }
    start = end;
    row_offsets_[r + 1] = out;
  }
  col_indices_.resize(static_cast<std::size_t>(out));
  values_.resize(static_cast<std::size_t>(out));
}

SparseMatrix SparseMatrix::from_triplets(index_t rows, index_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw Error(ErrorCode::ShapeMismatch, "triplet (" + std::to_string(t.row) + ", " +
                                                std::to_string(t.col) + ") outside " +
                                                std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<index_t> offsets(static_cast<std::size_t>(rows + 1), 0);
  std::vector<index_t> cols_out;
  std::vector<double> vals_out;
  cols_out.reserve(triplets.size());
  vals_out.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size();) {
    const auto& t = triplets[i];
    double sum = 0.0;
    std::size_t j = i;
    for (; j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col; ++j) {
      sum += triplets[j].value;
    }
    if (sum != 0.0) {
      cols_out.push_back(t.col);
      vals_out.push_back(sum);
      ++offsets[static_cast<std::size_t>(t.row + 1)];
    }
    i = j;
  }
  for (index_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals_out));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  std::vector<index_t> offsets(static_cast<std::size_t>(dense.rows() + 1), 0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  for (index_t r = 0; r < dense.rows(); ++r) {
    for (index_t c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        cols.push_back(c);
        vals.push_back(dense(r, c));
      }
    }
    offsets[r + 1] = static_cast<index_t>(vals.size());
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

double SparseMatrix::density() const noexcept {
  if (rows_ == 0 || cols_ == 0) return 0.0;
  return static_cast<double>(nnz()) / (static_cast<double>(rows_) * static_cast<double>(cols_));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (index_t r = 0; r < rows_; ++r)
    for (index_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) d(r, col_indices_[p]) = values_[p];
  return d;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<index_t> offsets(static_cast<std::size_t>(cols_ + 1), 0);
  for (index_t c : col_indices_) ++offsets[static_cast<std::size_t>(c + 1)];
  for (index_t c = 0; c < cols_; ++c) offsets[c + 1] += offsets[c];
  std::vector<index_t> next(offsets.begin(), offsets.end() - 1);
  std::vector<index_t> t_cols(values_.size());
  std::vector<double> t_vals(values_.size());
  // Rows are visited in order, so each transposed row comes out sorted.
  for (index_t r = 0; r < rows_; ++r) {
    for (index_t p = row_offsets_[r]; p < row_offsets_[r + 1]; ++p) {
      index_t dst = next[static_cast<std::size_t>(col_indices_[p])]++;
      t_cols[dst] = r;
      t_vals[dst] = values_[p];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(t_cols), std::move(t_vals));
}

SparseMatrix SparseMatrix::scaled(double alpha) const {
  std::vector<double> vals(values_);
  for (double& v : vals) v *= alpha;
  return SparseMatrix(rows_, cols_, row_offsets_, col_indices_, std::move(vals));
}

// ---------------------------------------------------------------------------
// Block-column partitioning
// ---------------------------------------------------------------------------

BlockColumnPartition BlockColumnPartition::make(index_t parent_cols, index_t k) {
  if (k < 1) throw Error(ErrorCode::InconsistentParams, "block count must be >= 1");
  if (parent_cols % k != 0) {
    throw Error(ErrorCode::NonDivisibleWidth, std::to_string(parent_cols) +
                                                  " columns cannot be split into " +
                                                  std::to_string(k) + " equal blocks");
  }
  return {parent_cols, k, parent_cols / k};
}

std::vector<SparseMatrix> partition_block_columns(const SparseMatrix& a, index_t k) {
  const auto part = BlockColumnPartition::make(a.cols(), k);
  const index_t w = part.block_width;
  std::vector<std::vector<index_t>> offsets(static_cast<std::size_t>(k),
                                            std::vector<index_t>(static_cast<std::size_t>(a.rows() + 1), 0));
  std::vector<std::vector<index_t>> cols(static_cast<std::size_t>(k));
  std::vector<std::vector<double>> vals(static_cast<std::size_t>(k));
  for (index_t r = 0; r < a.rows(); ++r) {
    auto rc = a.row_cols(r);
    auto rv = a.row_values(r);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      auto b = static_cast<std::size_t>(rc[p] / w);
      cols[b].push_back(rc[p] % w);
      vals[b].push_back(rv[p]);
    }
    for (std::size_t b = 0; b < static_cast<std::size_t>(k); ++b) {
      offsets[b][r + 1] = static_cast<index_t>(vals[b].size());
    }
  }
  std::vector<SparseMatrix> blocks;
  blocks.reserve(static_cast<std::size_t>(k));
  for (std::size_t b = 0; b < static_cast<std::size_t>(k); ++b) {
    blocks.emplace_back(a.rows(), w, std::move(offsets[b]), std::move(cols[b]), std::move(vals[b]));
  }
  return blocks;
}

SparseMatrix concat_block_columns(std::span<const SparseMatrix> blocks) {
  if (blocks.empty()) return SparseMatrix();
  const index_t rows = blocks.front().rows();
  index_t total_cols = 0;
  index_t total_nnz = 0;
  for (const auto& b : blocks) {
    if (b.rows() != rows) throw Error(ErrorCode::ShapeMismatch, "blocks must share a row count");
    total_cols += b.cols();
    total_nnz += b.nnz();
  }
  std::vector<index_t> offsets(static_cast<std::size_t>(rows + 1), 0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  cols.reserve(static_cast<std::size_t>(total_nnz));
  vals.reserve(static_cast<std::size_t>(total_nnz));
  for (index_t r = 0; r < rows; ++r) {
    index_t base = 0;
    for (const auto& b : blocks) {
      auto rc = b.row_cols(r);
      auto rv = b.row_values(r);
      for (std::size_t p = 0; p < rc.size(); ++p) {
        cols.push_back(base + rc[p]);
        vals.push_back(rv[p]);
      }
      base += b.cols();
    }
    offsets[r + 1] = static_cast<index_t>(vals.size());
  }
  return SparseMatrix(rows, total_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix pad_columns(const SparseMatrix& a, index_t k) {
  if (k < 1) throw Error(ErrorCode::InconsistentParams, "block count must be >= 1");
  const index_t rem = a.cols() % k;
  if (rem == 0) return a;
  const index_t padded = a.cols() + (k - rem);
  auto offsets = std::vector<index_t>(a.row_offsets().begin(), a.row_offsets().end());
  auto cols = std::vector<index_t>(a.col_indices().begin(), a.col_indices().end());
  auto vals = std::vector<double>(a.values().begin(), a.values().end());
  return SparseMatrix(a.rows(), padded, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix generate_random_sparse(index_t rows, index_t cols, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0)) {
    throw Error(ErrorCode::InvalidDensity, "density must lie in (0, 1], got " + std::to_string(density));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> value(0.0, 1.0);
  std::vector<index_t> offsets(static_cast<std::size_t>(rows + 1), 0);
  std::vector<index_t> col_idx;
  std::vector<double> vals;
  const double expected = density * static_cast<double>(rows) * static_cast<double>(cols);
  col_idx.reserve(static_cast<std::size_t>(expected * 1.05) + 16);
  vals.reserve(col_idx.capacity());

  // Skip ahead by geometric gaps: the positions of successes in a Bernoulli
  // sequence, which matches per-entry sampling in distribution.
  const index_t total = rows * cols;
  auto sample_value = [&] {
    double v = 0.0;
    while (v == 0.0) v = value(rng);
    return v;
  };
  if (density >= 1.0) {
    for (index_t lin = 0; lin < total; ++lin) {
      col_idx.push_back(lin % cols);
      vals.push_back(sample_value());
      ++offsets[static_cast<std::size_t>(lin / cols + 1)];
    }
  } else {
    std::geometric_distribution<index_t> gap(density);
    for (index_t lin = gap(rng); lin < total; lin += 1 + gap(rng)) {
      col_idx.push_back(lin % cols);
      vals.push_back(sample_value());
      ++offsets[static_cast<std::size_t>(lin / cols + 1)];
    }
  }
  for (index_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
  return SparseMatrix(rows, cols, std::move(offsets), std::move(col_idx), std::move(vals));
}

DenseMatrix generate_random_dense(index_t rows, index_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> value(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = value(rng);
  return m;
}

SparseMatrix sparse_linear_combination(std::span<const SparseMatrix> blocks,
                                       std::span<const double> coeffs) {
  return kernels::omp::linear_combination(blocks, coeffs);
}

DenseMatrix spmv_transpose(const SparseMatrix& a, const DenseMatrix& x) {
  return kernels::omp::spmv_transpose(a, x);
}

ProductResult spgemm_transpose(const SparseMatrix& a, const SparseMatrix& b) {
  return kernels::omp::spgemm_transpose(a, b);
}

double predicted_encoded_density(double density, int weight) {
  if (!(density > 0.0 && density <= 1.0)) {
    throw Error(ErrorCode::InvalidDensity, "density must lie in (0, 1]");
  }
  if (weight < 1) throw Error(ErrorCode::InconsistentParams, "weight must be >= 1");
  return 1.0 - std::pow(1.0 - density, weight);
}

}  // namespace scc
