// Serial reference vs OpenMP kernels. Arg(0) is the serial variant, Arg(1) the
// OpenMP one; compare the pairs in the output.
#include <benchmark/benchmark.h>

#include <vector>

#include "scc/kernels.hpp"
#include "scc/plan.hpp"
#include "scc/stability.hpp"

using namespace scc;

namespace {

const SparseMatrix& big_a() {
  static const auto a = generate_random_sparse(20000, 400, 0.01, 1);
  return a;
}

const SparseMatrix& big_b() {
  static const auto b = generate_random_sparse(20000, 300, 0.01, 2);
  return b;
}

void BM_SpMV(benchmark::State& state) {
  const auto& a = big_a();
  const auto x = generate_random_dense(a.rows(), 1, 3);
  for (auto _ : state) {
    auto y = state.range(0) == 0 ? kernels::serial::spmv_transpose(a, x) : kernels::omp::spmv_transpose(a, x);
    benchmark::DoNotOptimize(y);
  }
  state.counters["nnz"] = static_cast<double>(a.nnz());
}

void BM_SpGEMM(benchmark::State& state) {
  const auto& a = big_a();
  const auto& b = big_b();
  for (auto _ : state) {
    auto c = state.range(0) == 0 ? kernels::serial::spgemm_transpose(a, b) : kernels::omp::spgemm_transpose(a, b);
    benchmark::DoNotOptimize(c);
  }
}

void BM_LinearCombination(benchmark::State& state) {
  std::vector<SparseMatrix> blocks;
  for (std::uint64_t i = 0; i < 6; ++i) blocks.push_back(generate_random_sparse(20000, 500, 0.01, 10 + i));
  const std::vector<double> coeffs = {0.3, -1.2, 0.7, 2.0, -0.4, 1.1};
  for (auto _ : state) {
    auto m = state.range(0) == 0 ? kernels::serial::linear_combination(blocks, coeffs)
                                 : kernels::omp::linear_combination(blocks, coeffs);
    benchmark::DoNotOptimize(m);
  }
}

void BM_KappaWorst(benchmark::State& state) {
  const auto plan = plan_matmat(27, 6, 4, 3, 2, 2, Distribution::normal(0, 1), 0);
  KappaOptions opts;
  opts.execution = state.range(0) == 0 ? Execution::serial : Execution::parallel;
  for (auto _ : state) benchmark::DoNotOptimize(kappa_worst(plan, opts).kappa_worst);
}

}  // namespace

BENCHMARK(BM_SpMV)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SpGEMM)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinearCombination)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KappaWorst)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
