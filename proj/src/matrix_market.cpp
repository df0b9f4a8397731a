#include "scc/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scc/error.hpp"

namespace scc {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

struct Header {
  std::string format;  // coordinate | array
};

Header read_banner(std::istream& in, std::size_t& line_no, const std::string& expected_format) {
  std::string line;
  if (!std::getline(in, line)) parse_error(1, "empty input");
  line_no = 1;
  std::istringstream ss(line);
  std::string banner, object, format, field, symmetry;
  ss >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") parse_error(line_no, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") parse_error(line_no, "object must be 'matrix'");
  if (format != "coordinate" && format != "array") parse_error(line_no, "unknown format '" + format + "'");
  if (field == "complex" || field == "pattern") {
    throw Error(ErrorCode::UnsupportedField, "field '" + field + "' is not supported");
  }
  if (field != "real" && field != "integer" && field != "double") {
    parse_error(line_no, "unknown field '" + field + "'");
  }
  if (symmetry != "general") {
    throw Error(ErrorCode::UnsupportedField, "only 'general' symmetry is supported, got '" + symmetry + "'");
  }
  if (format != expected_format) {
    parse_error(line_no, "expected " + expected_format + " format, found " + format);
  }
  return {format};
}

// Next non-comment, non-blank line.
bool next_data_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::size_t line_no = 0;
  read_banner(in, line_no, "coordinate");
  std::string line;
  if (!next_data_line(in, line, line_no)) parse_error(line_no + 1, "missing size line");
  long long rows = -1, cols = -1, entries = -1;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0) {
      parse_error(line_no, "size line must be 'rows cols entries'");
    }
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(entries));
  for (long long e = 0; e < entries; ++e) {
    if (!next_data_line(in, line, line_no)) {
      parse_error(line_no + 1, "expected " + std::to_string(entries) + " entries, found " + std::to_string(e));
    }
    std::istringstream ss(line);
    long long r = 0, c = 0;
    double v = 0.0;
    if (!(ss >> r >> c >> v)) parse_error(line_no, "entry must be 'row col value'");
    if (r < 1 || r > rows || c < 1 || c > cols) parse_error(line_no, "index out of range");
    triplets.push_back({r - 1, c - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  for (index_t r = 0; r < a.rows(); ++r) {
    auto rc = a.row_cols(r);
    auto rv = a.row_values(r);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      out << (r + 1) << ' ' << (rc[p] + 1) << ' ' << format_double(rv[p]) << '\n';
    }
  }
}

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_matrix_market(a, out);
}

DenseMatrix read_dense_matrix_market(std::istream& in) {
  std::size_t line_no = 0;
  read_banner(in, line_no, "array");
  std::string line;
  if (!next_data_line(in, line, line_no)) parse_error(line_no + 1, "missing size line");
  long long rows = -1, cols = -1;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols) || rows < 0 || cols < 0) parse_error(line_no, "size line must be 'rows cols'");
  }
  DenseMatrix m(rows, cols);
  for (long long c = 0; c < cols; ++c) {
    for (long long r = 0; r < rows; ++r) {
      if (!next_data_line(in, line, line_no)) parse_error(line_no + 1, "too few array values");
      std::istringstream ss(line);
      double v = 0.0;
      if (!(ss >> v)) parse_error(line_no, "value expected");
      m(r, c) = v;
    }
  }
  return m;
}

DenseMatrix read_dense_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dense_matrix_market(in);
}

void write_dense_matrix_market(const DenseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << ' ' << a.cols() << '\n';
  for (index_t c = 0; c < a.cols(); ++c)
    for (index_t r = 0; r < a.rows(); ++r) out << format_double(a(r, c)) << '\n';
}

void write_dense_matrix_market(const DenseMatrix& a, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_dense_matrix_market(a, out);
}

}  // namespace scc
