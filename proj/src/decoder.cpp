#include "scc/decoder.hpp"

#include <algorithm>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "scc/error.hpp"
#include "scc/linalg.hpp"

namespace scc {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const DenseMatrix& m) {
  return Eigen::Map<const RowMajor>(m.values().data(), m.rows(), m.cols());
}

void check_worker(const EncodingPlan& plan, int id) {
  if (id < 0 || id >= plan.n()) {
    throw Error(ErrorCode::InvalidWorker, "worker " + std::to_string(id) + " outside [0, " +
                                              std::to_string(plan.n()) + ")");
  }
}

void check_survivors(const EncodingPlan& plan, std::span<const int> ids) {
  if (static_cast<int>(ids.size()) != plan.tau()) {
    throw Error(ErrorCode::WrongSubsetSize, "need exactly " + std::to_string(plan.tau()) + " survivors, got " +
                                                std::to_string(ids.size()));
  }
  std::set<int> seen;
  for (int id : ids) {
    check_worker(plan, id);
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::WrongSubsetSize, "survivor " + std::to_string(id) + " listed twice");
    }
  }
}

// Each result block flattened into one row of the right-hand side.
RowMajor stack_results(std::span<const DenseMatrix> results, index_t block_rows, index_t block_cols) {
  RowMajor rhs(static_cast<Eigen::Index>(results.size()), block_rows * block_cols);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.rows() != block_rows || r.cols() != block_cols) {
      throw Error(ErrorCode::ShapeMismatch, "result " + std::to_string(i) + " is " + std::to_string(r.rows()) +
                                                "x" + std::to_string(r.cols()) + ", expected " +
                                                std::to_string(block_rows) + "x" + std::to_string(block_cols));
    }
    for (index_t p = 0; p < block_rows * block_cols; ++p) rhs(static_cast<Eigen::Index>(i), p) = r.values()[static_cast<std::size_t>(p)];
  }
  return rhs;
}

DenseMatrix to_dense(const RowMajor& m) {
  DenseMatrix out(m.rows(), m.cols());
  Eigen::Map<RowMajor>(out.values().data(), m.rows(), m.cols()) = m;
  return out;
}

}  // namespace

std::vector<double> effective_row(const EncodingPlan& plan, int worker_id) {
  check_worker(plan, worker_id);
  std::vector<double> row(static_cast<std::size_t>(plan.tau()), 0.0);
  const int kb = plan.k_b();
  for (int u : plan.supports_a()[static_cast<std::size_t>(worker_id)]) {
    for (int v : plan.supports_b()[static_cast<std::size_t>(worker_id)]) {
      row[static_cast<std::size_t>(u * kb + v)] = plan.coeffs_a()(worker_id, u) * plan.coeffs_b()(worker_id, v);
    }
  }
  return row;
}

DenseMatrix stacked_effective_rows(const EncodingPlan& plan, std::span<const int> worker_ids) {
  DenseMatrix m(static_cast<index_t>(worker_ids.size()), plan.tau());
  for (std::size_t i = 0; i < worker_ids.size(); ++i) {
    const auto row = effective_row(plan, worker_ids[i]);
    std::copy(row.begin(), row.end(), m.values().begin() + static_cast<std::ptrdiff_t>(i * row.size()));
  }
  return m;
}

DecodingSystem build_decoding_system(const EncodingPlan& plan, std::span<const int> survivor_ids) {
  check_survivors(plan, survivor_ids);
  DecodingSystem sys;
  sys.tau = plan.tau();
  sys.matrix = stacked_effective_rows(plan, survivor_ids);
  sys.survivor_ids.assign(survivor_ids.begin(), survivor_ids.end());
  sys.unknown_index_map.reserve(static_cast<std::size_t>(sys.tau));
  for (int j = 0; j < sys.tau; ++j) sys.unknown_index_map.emplace_back(j / plan.k_b(), j % plan.k_b());
  return sys;
}

double reciprocal_condition(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  // A wide matrix has fewer singular values than columns: rank deficient.
  if (m.rows() < m.cols()) return 0.0;
  const auto sv = singular_values(m);
  if (sv.front() == 0.0) return 0.0;
  return sv.back() / sv.front();
}

bool is_recoverable(const EncodingPlan& plan, std::span<const int> survivor_ids, double rcond) {
  const auto sys = build_decoding_system(plan, survivor_ids);
  return reciprocal_condition(sys.matrix) > rcond;
}

DenseMatrix assemble_product(const EncodingPlan& plan, const DenseMatrix& unknowns, index_t block_rows,
                             index_t block_cols) {
  const int ka = plan.k_a();
  const int kb = plan.k_b();
  const index_t rows = block_rows * ka;
  const index_t cols = block_cols * kb;
  const index_t keep_rows = plan.source_cols_a() > 0 ? std::min(plan.source_cols_a(), rows) : rows;
  const index_t keep_cols =
      plan.kind() == PlanKind::matmat && plan.source_cols_b() > 0 ? std::min(plan.source_cols_b(), cols) : cols;
  DenseMatrix full(keep_rows, keep_cols);
  for (int u = 0; u < ka; ++u) {
    for (int v = 0; v < kb; ++v) {
      auto block = unknowns.row(u * kb + v);
      for (index_t i = 0; i < block_rows; ++i) {
        const index_t gr = u * block_rows + i;
        if (gr >= keep_rows) break;
        for (index_t j = 0; j < block_cols; ++j) {
          const index_t gc = v * block_cols + j;
          if (gc >= keep_cols) break;
          full(gr, gc) = block[static_cast<std::size_t>(i * block_cols + j)];
        }
      }
    }
  }
  return plan.transposed() ? full.transposed() : full;
}

DenseMatrix decode(const EncodingPlan& plan, std::span<const int> survivor_ids, std::span<const DenseMatrix> results,
                   double rcond) {
  const auto sys = build_decoding_system(plan, survivor_ids);
  if (results.size() != survivor_ids.size()) {
    throw Error(ErrorCode::ShapeMismatch, "one result per survivor is required");
  }
  const index_t block_rows = results.front().rows();
  const index_t block_cols = results.front().cols();
  const double rc = reciprocal_condition(sys.matrix);
  if (!(rc > rcond)) {
    throw Error(ErrorCode::SingularSystem, "decoding matrix has reciprocal condition " + std::to_string(rc));
  }
  const RowMajor rhs = stack_results(results, block_rows, block_cols);
  // One factorization serves every column of the stacked right-hand side.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(view(sys.matrix));
  const RowMajor solved = lu.solve(rhs);
  return assemble_product(plan, to_dense(solved), block_rows, block_cols);
}

DenseMatrix decode_least_squares(const EncodingPlan& plan, std::span<const WorkerResult> available, double rcond) {
  if (static_cast<int>(available.size()) < plan.tau()) {
    throw Error(ErrorCode::RankDeficient, "only " + std::to_string(available.size()) + " results for " +
                                              std::to_string(plan.tau()) + " unknowns");
  }
  std::vector<int> ids;
  std::vector<DenseMatrix> values;
  std::set<int> seen;
  for (const auto& r : available) {
    check_worker(plan, r.worker_id);
    if (!seen.insert(r.worker_id).second) {
      throw Error(ErrorCode::RankDeficient, "worker " + std::to_string(r.worker_id) + " reported twice");
    }
    ids.push_back(r.worker_id);
    values.push_back(r.value);
  }
  const DenseMatrix system = stacked_effective_rows(plan, ids);
  const double rc = reciprocal_condition(system);
  if (!(rc > rcond)) {
    throw Error(ErrorCode::RankDeficient, "stacked rows have reciprocal condition " + std::to_string(rc));
  }
  const index_t block_rows = values.front().rows();
  const index_t block_cols = values.front().cols();
  const RowMajor rhs = stack_results(values, block_rows, block_cols);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(view(system));
  const RowMajor solved = qr.solve(rhs);
  return assemble_product(plan, to_dense(solved), block_rows, block_cols);
}

}  // namespace scc
