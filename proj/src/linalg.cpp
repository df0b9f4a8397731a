#include "scc/linalg.hpp"

#include <algorithm>
#include <string>

#include <lapacke.h>

#include "scc/error.hpp"

namespace scc {

std::vector<double> singular_values(const DenseMatrix& m) {
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  std::vector<double> sv(static_cast<std::size_t>(std::min(rows, cols)));
  if (sv.empty()) return sv;
  // dgesdd overwrites its input. Row-major storage read column-major is the
  // transpose, which has the same singular values; the row-major LAPACKE
  // wrapper rejects the dummy leading dimensions of jobz='N'.
  std::vector<double> work(m.values().begin(), m.values().end());
  const lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', cols, rows, work.data(), cols, sv.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw Error(ErrorCode::SingularSystem, "dgesdd failed with info " + std::to_string(info));
  return sv;
}

}  // namespace scc
