#include "scc/encode.hpp"

#include "scc/error.hpp"

namespace scc {

SparseMatrix encode_block(std::span<const SparseMatrix> blocks, const Support& support, const DenseMatrix& coeffs,
                          int worker) {
  std::vector<SparseMatrix> chosen;
  std::vector<double> weights;
  chosen.reserve(support.size());
  weights.reserve(support.size());
  for (int q : support) {
    chosen.push_back(blocks[static_cast<std::size_t>(q)]);
    weights.push_back(coeffs(worker, q));
  }
  return sparse_linear_combination(chosen, weights);
}

std::vector<WorkerTask> encode_tasks(const SparseMatrix& a, const DenseMatrix& x, const EncodingPlan& plan) {
  if (plan.kind() != PlanKind::matvec) throw Error(ErrorCode::PlanMismatch, "matvec encoding needs a matvec plan");
  if (x.rows() != a.rows() || x.cols() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "x must be a column vector with A.rows() entries");
  }
  const auto blocks = partition_block_columns(a, plan.k_a());
  auto shared_x = std::make_shared<const DenseMatrix>(x);
  std::vector<WorkerTask> tasks(static_cast<std::size_t>(plan.n()));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < plan.n(); ++i) {
    auto& t = tasks[static_cast<std::size_t>(i)];
    t.worker_id = i;
    t.encoded_a = encode_block(blocks, plan.supports_a()[static_cast<std::size_t>(i)], plan.coeffs_a(), i);
    t.vector_x = shared_x;
  }
  return tasks;
}

std::vector<WorkerTask> encode_tasks(const SparseMatrix& a, const SparseMatrix& b, const EncodingPlan& plan) {
  if (plan.kind() != PlanKind::matmat) throw Error(ErrorCode::PlanMismatch, "matmat encoding needs a matmat plan");
  if (a.rows() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "A and B must have the same row count");
  const SparseMatrix& first = plan.transposed() ? b : a;
  const SparseMatrix& second = plan.transposed() ? a : b;
  const auto blocks_a = partition_block_columns(first, plan.k_a());
  const auto blocks_b = partition_block_columns(second, plan.k_b());
  std::vector<WorkerTask> tasks(static_cast<std::size_t>(plan.n()));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < plan.n(); ++i) {
    auto& t = tasks[static_cast<std::size_t>(i)];
    t.worker_id = i;
    t.encoded_a = encode_block(blocks_a, plan.supports_a()[static_cast<std::size_t>(i)], plan.coeffs_a(), i);
    t.encoded_b = encode_block(blocks_b, plan.supports_b()[static_cast<std::size_t>(i)], plan.coeffs_b(), i);
  }
  return tasks;
}

}  // namespace scc
