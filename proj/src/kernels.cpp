#include "scc/kernels.hpp"

#include <algorithm>
#include <string>
#include <vector>

#ifdef SCC_HAVE_OPENMP
#include <omp.h>
#endif

#include "scc/error.hpp"

namespace scc::kernels {

namespace {

void check_combination(std::span<const SparseMatrix> blocks, std::span<const double> coeffs) {
  if (blocks.empty() || blocks.size() != coeffs.size()) {
    throw Error(ErrorCode::ShapeMismatch, "need one coefficient per block and at least one block");
  }
  for (const auto& b : blocks) {
    if (b.rows() != blocks.front().rows() || b.cols() != blocks.front().cols()) {
      throw Error(ErrorCode::ShapeMismatch, "combined blocks must share a shape");
    }
  }
}

void check_spmv(const SparseMatrix& a, const DenseMatrix& x) {
  if (x.rows() != a.rows() || x.cols() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "x must be " + std::to_string(a.rows()) + "x1, got " +
                                              std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

void check_spgemm(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "A^T B needs equal row counts, got " + std::to_string(a.rows()) +
                                              " and " + std::to_string(b.rows()));
  }
}

// Merges row r of every block into (cols, vals), dropping exact zeros.
// `acc` and `mark` are scratch of length block cols; `touched` lists the
// columns written.
struct RowMerger {
  std::vector<double> acc;
  std::vector<char> mark;
  std::vector<index_t> touched;

  explicit RowMerger(index_t cols) : acc(static_cast<std::size_t>(cols), 0.0), mark(static_cast<std::size_t>(cols), 0) {}

  template <typename Emit>
  void merge(std::span<const SparseMatrix> blocks, std::span<const double> coeffs, index_t r, Emit&& emit) {
    touched.clear();
    for (std::size_t q = 0; q < blocks.size(); ++q) {
      auto rc = blocks[q].row_cols(r);
      auto rv = blocks[q].row_values(r);
      for (std::size_t p = 0; p < rc.size(); ++p) {
        auto c = static_cast<std::size_t>(rc[p]);
        if (!mark[c]) {
          mark[c] = 1;
          touched.push_back(rc[p]);
        }
        acc[c] += coeffs[q] * rv[p];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (index_t c : touched) {
      auto cu = static_cast<std::size_t>(c);
      if (acc[cu] != 0.0) emit(c, acc[cu]);
      acc[cu] = 0.0;
      mark[cu] = 0;
    }
  }
};

}  // namespace

int max_threads() {
#ifdef SCC_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_num_threads(int threads) {
#ifdef SCC_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

// ---------------------------------------------------------------------------
// serial reference
// ---------------------------------------------------------------------------

namespace serial {

DenseMatrix spmv_transpose(const SparseMatrix& a, const DenseMatrix& x) {
  check_spmv(a, x);
  DenseMatrix y(a.cols(), 1);
  auto xv = x.values();
  auto yv = y.values();
  for (index_t r = 0; r < a.rows(); ++r) {
    auto rc = a.row_cols(r);
    auto rv = a.row_values(r);
    for (std::size_t p = 0; p < rc.size(); ++p) yv[static_cast<std::size_t>(rc[p])] += rv[p] * xv[static_cast<std::size_t>(r)];
  }
  return y;
}

ProductResult spgemm_transpose(const SparseMatrix& a, const SparseMatrix& b) {
  check_spgemm(a, b);
  ProductResult out{DenseMatrix(a.cols(), b.cols()), 0};
  for (index_t k = 0; k < a.rows(); ++k) {
    auto ac = a.row_cols(k);
    auto av = a.row_values(k);
    auto bc = b.row_cols(k);
    auto bv = b.row_values(k);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      for (std::size_t q = 0; q < bc.size(); ++q) out.value(ac[p], bc[q]) += av[p] * bv[q];
    }
    out.flops += static_cast<std::uint64_t>(ac.size()) * static_cast<std::uint64_t>(bc.size());
  }
  return out;
}

SparseMatrix linear_combination(std::span<const SparseMatrix> blocks, std::span<const double> coeffs) {
  check_combination(blocks, coeffs);
  const auto& first = blocks.front();
  std::vector<index_t> offsets(static_cast<std::size_t>(first.rows() + 1), 0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  RowMerger merger(first.cols());
  for (index_t r = 0; r < first.rows(); ++r) {
    merger.merge(blocks, coeffs, r, [&](index_t c, double v) {
      cols.push_back(c);
      vals.push_back(v);
    });
    offsets[r + 1] = static_cast<index_t>(vals.size());
  }
  return SparseMatrix(first.rows(), first.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP
// ---------------------------------------------------------------------------

namespace omp {

DenseMatrix spmv_transpose(const SparseMatrix& a, const DenseMatrix& x) {
  check_spmv(a, x);
  const index_t n = a.cols();
  const int threads = max_threads();
  if (threads == 1) return serial::spmv_transpose(a, x);
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(threads));
  auto xv = x.values();
#pragma omp parallel num_threads(threads)
  {
#ifdef SCC_HAVE_OPENMP
    const int tid = omp_get_thread_num();
#else
    const int tid = 0;
#endif
    auto& local = partial[static_cast<std::size_t>(tid)];
    local.assign(static_cast<std::size_t>(n), 0.0);
#pragma omp for schedule(static)
    for (index_t r = 0; r < a.rows(); ++r) {
      auto rc = a.row_cols(r);
      auto rv = a.row_values(r);
      for (std::size_t p = 0; p < rc.size(); ++p) local[static_cast<std::size_t>(rc[p])] += rv[p] * xv[static_cast<std::size_t>(r)];
    }
  }
  DenseMatrix y(n, 1);
  auto yv = y.values();
  for (const auto& local : partial)
    for (std::size_t c = 0; c < local.size(); ++c) yv[c] += local[c];
  return y;
}

ProductResult spgemm_transpose(const SparseMatrix& a, const SparseMatrix& b) {
  check_spgemm(a, b);
  const SparseMatrix at = a.transposed();
  ProductResult out{DenseMatrix(a.cols(), b.cols()), 0};
  std::uint64_t flops = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : flops)
  for (index_t i = 0; i < at.rows(); ++i) {
    auto kc = at.row_cols(i);
    auto kv = at.row_values(i);
    double* dst = &out.value(i, 0);
    for (std::size_t p = 0; p < kc.size(); ++p) {
      auto bc = b.row_cols(kc[p]);
      auto bv = b.row_values(kc[p]);
      for (std::size_t q = 0; q < bc.size(); ++q) dst[bc[q]] += kv[p] * bv[q];
      flops += bc.size();
    }
  }
  out.flops = flops;
  return out;
}

SparseMatrix linear_combination(std::span<const SparseMatrix> blocks, std::span<const double> coeffs) {
  check_combination(blocks, coeffs);
  const auto& first = blocks.front();
  const index_t rows = first.rows();
  std::vector<index_t> offsets(static_cast<std::size_t>(rows + 1), 0);

#pragma omp parallel
  {
    RowMerger merger(first.cols());
#pragma omp for schedule(static)
    for (index_t r = 0; r < rows; ++r) {
      index_t count = 0;
      merger.merge(blocks, coeffs, r, [&](index_t, double) { ++count; });
      offsets[r + 1] = count;
    }
  }
  for (index_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];

  std::vector<index_t> cols(static_cast<std::size_t>(offsets.back()));
  std::vector<double> vals(cols.size());
#pragma omp parallel
  {
    RowMerger merger(first.cols());
#pragma omp for schedule(static)
    for (index_t r = 0; r < rows; ++r) {
      index_t pos = offsets[r];
      merger.merge(blocks, coeffs, r, [&](index_t c, double v) {
        cols[pos] = c;
        vals[pos] = v;
        ++pos;
      });
    }
  }
  return SparseMatrix(rows, first.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace omp

}  // namespace scc::kernels
