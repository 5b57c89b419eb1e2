#include "mor/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mor/parallel.hpp"

namespace mor {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_real_point(cplx s) { return s.imag() == 0.0; }

void check_column_rank(const CMat& B, const char* name) {
  Eigen::JacobiSVD<CMat> svd(B);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double thresh = static_cast<double>(std::max(B.rows(), B.cols())) * kEps * smax;
  if (!(smax > 0.0) || sv(sv.size() - 1) <= thresh)
    fail(ErrorKind::RankDeficient, std::string(name) + " lost column rank (near-duplicate shifts?)");
}

}  // namespace

DenseModel ReducedModel::realization() const { return DenseModel{Er, Ar, br, cr, cplx(dr, 0.0)}; }

LtiSystem ReducedModel::to_system() const { return mor::to_system(realization()); }

cplx eval(const ReducedModel& m, cplx s) { return eval(m.realization(), s); }
TransferSample eval_deriv(const ReducedModel& m, cplx s) { return eval_deriv(m.realization(), s); }
std::vector<cplx> poles(const ReducedModel& m) { return poles(m.realization()); }

std::vector<cplx> canonical_shift_order(std::vector<cplx> points) {
  std::vector<cplx> reals, uppers, lowers;
  for (const cplx& s : points) {
    if (is_real_point(s)) reals.push_back(s);
    else if (s.imag() > 0) uppers.push_back(s);
    else lowers.push_back(s);
  }
  if (uppers.size() != lowers.size()) fail(ErrorKind::NotConjugateClosed, "shift set is not closed under conjugation");
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const cplx& s : reals) out.push_back(s);
  std::vector<bool> used(lowers.size(), false);
  for (const cplx& s : uppers) {
    std::size_t best = lowers.size();
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lowers.size(); ++j) {
      if (used[j]) continue;
      const double gap = std::abs(lowers[j] - std::conj(s));
      if (gap < best_gap) {
        best_gap = gap;
        best = j;
      }
    }
    if (best == lowers.size() || best_gap > 1e-8 * std::abs(s))
      fail(ErrorKind::NotConjugateClosed, "shift has no conjugate partner");
    used[best] = true;
    out.push_back(s);
    out.push_back(std::conj(s));
  }
  std::stable_sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (std::abs(a.imag()) != std::abs(b.imag())) return std::abs(a.imag()) < std::abs(b.imag());
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() > b.imag();
  });
  return out;
}

InterpolationBasis build_basis(const LtiSystem& sys, const std::vector<cplx>& points, ColumnScaling scaling) {
  const int n = sys.order();
  const int r = static_cast<int>(points.size());
  if (r < 1) fail(ErrorKind::InvalidInput, "at least one interpolation point is required");
  if (r > n) fail(ErrorKind::RankDeficient, "more interpolation points than states");
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j)
      if (std::abs(points[i] - points[j]) < 1e-10 * (1.0 + std::abs(points[i])))
        fail(ErrorKind::RankDeficient, "interpolation points coincide");

  InterpolationBasis basis;
  basis.points = canonical_shift_order(points);
  const auto& pts = basis.points;

  // Only real points and the upper member of each pair are solved for; the
  // lower member reuses the conjugate.
  std::vector<int> solve_idx;
  for (int i = 0; i < r; ++i)
    if (pts[i].imag() >= 0.0) solve_idx.push_back(i);

  struct Columns {
    CVec x, y;
    TransferSample sample;
  };
  const CVec b = sys.b().cast<cplx>(), c = sys.c().cast<cplx>();
  auto cols = parallel_map(solve_idx.size(), [&](std::size_t k) {
    const cplx s = pts[static_cast<std::size_t>(solve_idx[k])];
    ShiftedSolver solver(sys, s);
    Columns out;
    out.x = solver.solve(b);
    out.y = solver.solve_transposed(c);
    const CVec Ex = sys.storage() == Storage::dense ? CVec(sys.dense_E().cast<cplx>() * out.x)
                                                    : CVec(sys.sparse_E().cast<cplx>() * out.x);
    out.sample = {s, (c.transpose() * out.x)(0) + sys.d(), -(out.y.transpose() * Ex)(0)};
    return out;
  });

  basis.V.resize(n, r);
  basis.W.resize(n, r);
  basis.v_scales = Vec::Ones(r);
  basis.w_scales = Vec::Ones(r);
  basis.samples.resize(static_cast<std::size_t>(r));
  for (std::size_t k = 0; k < solve_idx.size(); ++k) {
    const int i = solve_idx[k];
    const Columns& col = cols[k];
    double vs = 1.0, ws = 1.0;
    if (scaling == ColumnScaling::unit_column) {
      vs = 1.0 / col.x.norm();
      ws = 1.0 / col.y.norm();
    }
    basis.V.col(i) = vs * col.x;
    basis.W.col(i) = ws * col.y;
    basis.v_scales[i] = vs;
    basis.w_scales[i] = ws;
    basis.samples[static_cast<std::size_t>(i)] = col.sample;
    if (pts[i].imag() > 0.0) {
      const int j = i + 1;  // canonical order puts the conjugate next
      basis.V.col(j) = basis.V.col(i).conjugate();
      basis.W.col(j) = basis.W.col(i).conjugate();
      basis.v_scales[j] = vs;
      basis.w_scales[j] = ws;
      basis.samples[static_cast<std::size_t>(j)] = {std::conj(col.sample.point), std::conj(col.sample.value),
                                                    std::conj(col.sample.derivative)};
    }
  }
  if (!basis.V.allFinite() || !basis.W.allFinite()) fail(ErrorKind::SingularShift, "non-finite basis column");
  check_column_rank(basis.V, "V");
  check_column_rank(basis.W, "W");
  return basis;
}

ReducedModel project(const LtiSystem& sys, const InterpolationBasis& basis) {
  const int r = basis.size();
  if (r < 1) fail(ErrorKind::InvalidInput, "empty basis");
  if (basis.V.rows() != sys.order()) fail(ErrorKind::DimensionMismatch, "basis does not match system order");
  CMat EV, AV;
  if (sys.storage() == Storage::dense) {
    EV = sys.dense_E().cast<cplx>() * basis.V;
    AV = sys.dense_A().cast<cplx>() * basis.V;
  } else {
    EV = sys.sparse_E().cast<cplx>() * basis.V;
    AV = sys.sparse_A().cast<cplx>() * basis.V;
  }
  ReducedModel m;
  m.Er = basis.W.transpose() * EV;
  m.Ar = basis.W.transpose() * AV;
  m.br = basis.W.transpose() * sys.b().cast<cplx>();
  m.cr = basis.V.transpose() * sys.c().cast<cplx>();
  m.dr = 0.0;
  m.u_ones = basis.v_scales.cast<cplx>();
  m.w_ones = basis.w_scales.cast<cplx>();
  m.points = basis.points;
  Eigen::PartialPivLU<CMat> lu(m.Er);
  if (!(lu.rcond() > static_cast<double>(r) * kEps)) fail(ErrorKind::SingularPencil, "reduced E_r is numerically singular");
  return m;
}

ReducedModel realify(const ReducedModel& model) {
  const int r = model.order();
  if (static_cast<int>(model.points.size()) != r) fail(ErrorKind::NotConjugateClosed, "model carries no interpolation points");
  CMat T = CMat::Identity(r, r);
  bool any_pair = false;
  for (int i = 0; i < r; ++i) {
    const cplx s = model.points[static_cast<std::size_t>(i)];
    if (is_real_point(s)) continue;
    if (s.imag() < 0.0 || i + 1 >= r || model.points[static_cast<std::size_t>(i) + 1] != std::conj(s))
      fail(ErrorKind::NotConjugateClosed, "conjugate pairs are not adjacent in canonical order");
    // [v, conj v] * T = [Re v, Im v]
    T(i, i) = 0.5;
    T(i + 1, i) = 0.5;
    T(i, i + 1) = cplx(0.0, -0.5);
    T(i + 1, i + 1) = cplx(0.0, 0.5);
    any_pair = true;
    ++i;
  }
  ReducedModel out = model;
  if (any_pair) {
    out.Er = T.transpose() * model.Er * T;
    out.Ar = T.transpose() * model.Ar * T;
    out.br = T.transpose() * model.br;
    out.cr = T.transpose() * model.cr;
    out.u_ones = T.transpose() * model.u_ones;
    out.w_ones = T.transpose() * model.w_ones;
  }
  auto check_and_drop = [](auto& M, const char* name) {
    const double scale = M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
    const double im = M.size() ? M.imag().cwiseAbs().maxCoeff() : 0.0;
    if (im > 1e-8 * std::max(scale, 1e-300))
      fail(ErrorKind::NotConjugateClosed, std::string("imaginary residue remains in ") + name);
    M = M.real().template cast<cplx>();
  };
  check_and_drop(out.Er, "E_r");
  check_and_drop(out.Ar, "A_r");
  check_and_drop(out.br, "b_r");
  check_and_drop(out.cr, "c_r");
  check_and_drop(out.u_ones, "u_ones");
  check_and_drop(out.w_ones, "w_ones");
  return out;
}

}  // namespace mor
