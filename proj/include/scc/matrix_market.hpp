#pragma once

#include <filesystem>
#include <iosfwd>

#include "scc/matrix.hpp"

namespace scc {

// Coordinate format ("%%MatrixMarket matrix coordinate real general") for
// sparse matrices and array format ("... array real general", column-major)
// for dense blocks. Values are written with 17 significant digits so a
// write/read cycle is exact.

SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const SparseMatrix& a, std::ostream& out);
void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);

DenseMatrix read_dense_matrix_market(std::istream& in);
DenseMatrix read_dense_matrix_market(const std::filesystem::path& path);
void write_dense_matrix_market(const DenseMatrix& a, std::ostream& out);
void write_dense_matrix_market(const DenseMatrix& a, const std::filesystem::path& path);

}  // namespace scc
