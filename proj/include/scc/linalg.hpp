#pragma once

#include <vector>

#include "scc/matrix.hpp"

namespace scc {

/// Singular values in descending order (LAPACK dgesdd, values only).
std::vector<double> singular_values(const DenseMatrix& m);

}  // namespace scc
