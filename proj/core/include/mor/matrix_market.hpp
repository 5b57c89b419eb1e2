#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mor/statespace.hpp"

namespace mor {

/// Contents of one Matrix Market file. Coordinate files fill `sparse`,
/// array files fill `dense`.
struct MatrixMarket {
  bool coordinate = false;
  int rows = 0, cols = 0;
  Mat dense;
  SpMat sparse;

  /// Column vector view; DimensionMismatch unless one dimension is 1.
  Vec as_vector() const;
  Mat as_dense() const;
  SpMat as_sparse() const;
};

/// Real, integer or pattern fields with general, symmetric or
/// skew-symmetric storage. ParseError carries the offending line number.
MatrixMarket parse_matrix_market(std::istream& in, const std::string& name = "<stream>");
MatrixMarket read_matrix_market(const std::filesystem::path& path);

std::string format_matrix_market(const SpMat& A);
std::string format_matrix_market(const Mat& A);

/// Writes to a sibling temporary and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

void write_matrix_market(const std::filesystem::path& path, const SpMat& A);
void write_matrix_market(const std::filesystem::path& path, const Mat& A);

/// E.mtx, A.mtx, b.mtx, c.mtx and, when d != 0, d.mtx in `dir`. Sparse
/// systems are written in coordinate format, dense ones as arrays.
void write_system(const std::filesystem::path& dir, const LtiSystem& sys);

}  // namespace mor
