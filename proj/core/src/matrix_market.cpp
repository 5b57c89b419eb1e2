#include "mor/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mor {

namespace {

enum class Field { real, integer, pattern };
enum class Symmetry { general, symmetric, skew };

[[noreturn]] void parse_error(const std::string& name, int line, const std::string& what) {
  fail(ErrorKind::ParseError, name + ":" + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank_or_comment(const std::string& s) {
  for (char c : s) {
    if (c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

double parse_number(const std::string& tok, const std::string& name, int line) {
  double v = 0.0;
  const char* b = tok.data() + (!tok.empty() && tok[0] == '+' ? 1 : 0);
  const char* e = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) parse_error(name, line, "not a number: '" + tok + "'");
  return v;
}

long parse_index(const std::string& tok, const std::string& name, int line) {
  long v = 0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) parse_error(name, line, "not an integer: '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Vec MatrixMarket::as_vector() const {
  if (cols != 1 && rows != 1) fail(ErrorKind::DimensionMismatch, "expected a vector, got " + std::to_string(rows) + "x" + std::to_string(cols));
  const Mat d = as_dense();
  return cols == 1 ? Vec(d.col(0)) : Vec(d.row(0).transpose());
}

Mat MatrixMarket::as_dense() const { return coordinate ? Mat(sparse) : dense; }

SpMat MatrixMarket::as_sparse() const { return coordinate ? sparse : dense.sparseView(); }

MatrixMarket parse_matrix_market(std::istream& in, const std::string& name) {
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) parse_error(name, 1, "empty file");
  ++lineno;
  const auto head = tokens(lower(line));
  if (head.size() < 5 || head[0] != "%%matrixmarket" || head[1] != "matrix")
    parse_error(name, lineno, "missing %%MatrixMarket matrix header");
  MatrixMarket mm;
  if (head[2] == "coordinate") mm.coordinate = true;
  else if (head[2] != "array") parse_error(name, lineno, "unknown format '" + head[2] + "'");
  Field field;
  if (head[3] == "real" || head[3] == "double") field = Field::real;
  else if (head[3] == "integer") field = Field::integer;
  else if (head[3] == "pattern") field = Field::pattern;
  else parse_error(name, lineno, "unsupported field '" + head[3] + "'");
  if (field == Field::pattern && !mm.coordinate) parse_error(name, lineno, "pattern field requires coordinate format");
  Symmetry sym;
  if (head[4] == "general") sym = Symmetry::general;
  else if (head[4] == "symmetric") sym = Symmetry::symmetric;
  else if (head[4] == "skew-symmetric") sym = Symmetry::skew;
  else parse_error(name, lineno, "unsupported symmetry '" + head[4] + "'");

  do {
    if (!std::getline(in, line)) parse_error(name, lineno + 1, "missing size line");
    ++lineno;
  } while (blank_or_comment(line));
  const auto size = tokens(line);
  if (size.size() != (mm.coordinate ? 3u : 2u)) parse_error(name, lineno, "malformed size line");
  mm.rows = static_cast<int>(parse_index(size[0], name, lineno));
  mm.cols = static_cast<int>(parse_index(size[1], name, lineno));
  if (mm.rows < 0 || mm.cols < 0) parse_error(name, lineno, "negative dimension");
  if (sym != Symmetry::general && mm.rows != mm.cols) parse_error(name, lineno, "symmetric storage needs a square matrix");

  if (mm.coordinate) {
    const long nnz = parse_index(size[2], name, lineno);
    if (nnz < 0) parse_error(name, lineno, "negative entry count");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nnz) * (sym == Symmetry::general ? 1 : 2));
    long seen = 0;
    while (seen < nnz) {
      if (!std::getline(in, line)) parse_error(name, lineno + 1, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(seen));
      ++lineno;
      if (blank_or_comment(line)) continue;
      const auto t = tokens(line);
      const std::size_t want = field == Field::pattern ? 2 : 3;
      if (t.size() != want) parse_error(name, lineno, "malformed entry");
      const long i = parse_index(t[0], name, lineno), j = parse_index(t[1], name, lineno);
      if (i < 1 || i > mm.rows || j < 1 || j > mm.cols) parse_error(name, lineno, "index out of range");
      const double v = field == Field::pattern ? 1.0 : parse_number(t[2], name, lineno);
      trip.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
      if (sym != Symmetry::general && i != j) trip.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), sym == Symmetry::skew ? -v : v);
      ++seen;
    }
    mm.sparse.resize(mm.rows, mm.cols);
    mm.sparse.setFromTriplets(trip.begin(), trip.end());
    mm.sparse.makeCompressed();
  } else {
    mm.dense = Mat::Zero(mm.rows, mm.cols);
    // Column-major; symmetric storage lists the lower triangle only.
    std::vector<std::pair<int, int>> slots;
    for (int j = 0; j < mm.cols; ++j)
      for (int i = (sym == Symmetry::general ? 0 : (sym == Symmetry::skew ? j + 1 : j)); i < mm.rows; ++i) slots.emplace_back(i, j);
    std::size_t k = 0;
    while (k < slots.size()) {
      if (!std::getline(in, line)) parse_error(name, lineno + 1, "expected " + std::to_string(slots.size()) + " values, found " + std::to_string(k));
      ++lineno;
      if (blank_or_comment(line)) continue;
      for (const auto& tok : tokens(line)) {
        if (k >= slots.size()) parse_error(name, lineno, "too many values");
        const auto [i, j] = slots[k++];
        const double v = parse_number(tok, name, lineno);
        mm.dense(i, j) = v;
        if (sym == Symmetry::symmetric) mm.dense(j, i) = v;
        if (sym == Symmetry::skew) mm.dense(j, i) = -v;
      }
    }
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!blank_or_comment(line)) parse_error(name, lineno, "trailing data");
  }
  return mm;
}

MatrixMarket read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, path.string() + ": cannot open");
  return parse_matrix_market(in, path.string());
}

std::string format_matrix_market(const SpMat& A) {
  std::string out = "%%MatrixMarket matrix coordinate real general\n";
  out += std::to_string(A.rows()) + " " + std::to_string(A.cols()) + " " + std::to_string(A.nonZeros()) + "\n";
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it)
      out += std::to_string(it.row() + 1) + " " + std::to_string(it.col() + 1) + " " + fmt(it.value()) + "\n";
  return out;
}

std::string format_matrix_market(const Mat& A) {
  std::string out = "%%MatrixMarket matrix array real general\n";
  out += std::to_string(A.rows()) + " " + std::to_string(A.cols()) + "\n";
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i) out += fmt(A(i, j)) + "\n";
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) fail(ErrorKind::InvalidInput, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_matrix_market(const std::filesystem::path& path, const SpMat& A) { write_text_atomic(path, format_matrix_market(A)); }

void write_matrix_market(const std::filesystem::path& path, const Mat& A) { write_text_atomic(path, format_matrix_market(A)); }

void write_system(const std::filesystem::path& dir, const LtiSystem& sys) {
  if (sys.storage() == Storage::sparse) {
    write_matrix_market(dir / "E.mtx", sys.sparse_E());
    write_matrix_market(dir / "A.mtx", sys.sparse_A());
  } else {
    write_matrix_market(dir / "E.mtx", sys.dense_E());
    write_matrix_market(dir / "A.mtx", sys.dense_A());
  }
  write_matrix_market(dir / "b.mtx", Mat(sys.b()));
  write_matrix_market(dir / "c.mtx", Mat(sys.c()));
  if (sys.d() != 0.0) write_matrix_market(dir / "d.mtx", Mat::Constant(1, 1, sys.d()));
}

}  // namespace mor
