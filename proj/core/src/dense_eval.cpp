#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mor/statespace.hpp"

namespace mor {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Eigen::PartialPivLU<CMat> factor_shift(const DenseModel& m, cplx s) {
  CMat M = s * m.E - m.A;
  Eigen::PartialPivLU<CMat> lu(M);
  if (!(lu.rcond() > kEps)) fail(ErrorKind::SingularShift, "reduced pencil sE - A is singular at the requested shift");
  return lu;
}

double max_abs(const CMat& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const CVec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
double max_imag(const CMat& M) { return M.size() ? M.imag().cwiseAbs().maxCoeff() : 0.0; }
double max_imag(const CVec& v) { return v.size() ? v.imag().cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

cplx eval(const DenseModel& m, cplx s) {
  if (m.order() == 0) return m.d;
  const auto lu = factor_shift(m, s);
  const CVec x = lu.solve(m.b);
  return (m.c.transpose() * x)(0) + m.d;
}

TransferSample eval_deriv(const DenseModel& m, cplx s) {
  if (m.order() == 0) return {s, m.d, 0.0};
  const auto lu = factor_shift(m, s);
  const CVec x = lu.solve(m.b);
  const CVec y = lu.transpose().solve(m.c);
  return {s, (m.c.transpose() * x)(0) + m.d, -(y.transpose() * (m.E * x))(0)};
}

bool is_real(const DenseModel& m, double tol) {
  const double scale = std::max({max_abs(m.E), max_abs(m.A), max_abs(m.b), max_abs(m.c), std::abs(m.d)});
  const double im = std::max({max_imag(m.E), max_imag(m.A), max_imag(m.b), max_imag(m.c), std::abs(m.d.imag())});
  return im <= tol * scale;
}

std::vector<cplx> poles(const DenseModel& m) {
  const int n = m.order();
  if (n == 0) return {};
  std::vector<cplx> out(static_cast<std::size_t>(n));
  if (is_real(m)) {
    const Mat E = m.E.real(), A = m.A.real();
    Mat S = E.isIdentity(0.0) ? A : Mat(Eigen::PartialPivLU<Mat>(E).solve(A));
    Eigen::EigenSolver<Mat> es(S, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "eigenvalue iteration did not converge");
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  } else {
    Eigen::PartialPivLU<CMat> lu(m.E);
    if (!(lu.rcond() > kEps)) fail(ErrorKind::SingularPencil, "E is singular");
    CMat S = lu.solve(m.A);
    Eigen::ComplexEigenSolver<CMat> es(S, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "eigenvalue iteration did not converge");
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

DenseModel to_dense_model(const LtiSystem& sys, int cap) {
  DenseModel m;
  m.E = sys.E_dense(cap).cast<cplx>();
  m.A = sys.A_dense(cap).cast<cplx>();
  m.b = sys.b().cast<cplx>();
  m.c = sys.c().cast<cplx>();
  m.d = sys.d();
  return m;
}

LtiSystem to_system(const DenseModel& m) {
  if (!is_real(m, 1e-10)) fail(ErrorKind::NotConjugateClosed, "realization has non-negligible imaginary parts");
  if (m.order() == 0) return LtiSystem::static_gain(m.d.real());
  return LtiSystem::dense(m.E.real(), m.A.real(), m.b.real(), m.c.real(), m.d.real());
}

DenseModel block_difference(const DenseModel& a, const DenseModel& b) {
  const int na = a.order(), nb = b.order(), n = na + nb;
  DenseModel out;
  out.E = CMat::Zero(n, n);
  out.A = CMat::Zero(n, n);
  out.b.resize(n);
  out.c.resize(n);
  if (na) {
    out.E.topLeftCorner(na, na) = a.E;
    out.A.topLeftCorner(na, na) = a.A;
    out.b.head(na) = a.b;
    out.c.head(na) = a.c;
  }
  if (nb) {
    out.E.bottomRightCorner(nb, nb) = b.E;
    out.A.bottomRightCorner(nb, nb) = b.A;
    out.b.tail(nb) = b.b;
    out.c.tail(nb) = -b.c;
  }
  out.d = a.d - b.d;
  return out;
}

// ---------------------------------------------------------------------------

FastEvaluator::FastEvaluator(const DenseModel& m) : d_(m.d) {
  const int n = m.order();
  if (n == 0) return;
  Eigen::PartialPivLU<CMat> lu(m.E);
  if (!(lu.rcond() > kEps)) fail(ErrorKind::SingularPencil, "E is singular");
  const CMat S = lu.solve(m.A);
  const CVec bs = lu.solve(m.b);
  Eigen::HessenbergDecomposition<CMat> hd(S);
  H_ = hd.matrixH();
  const CMat Q = hd.matrixQ();
  bt_ = Q.adjoint() * bs;
  ct_ = Q.transpose() * m.c;
}

cplx FastEvaluator::operator()(cplx s) const {
  const Eigen::Index n = bt_.size();
  if (n == 0) return d_;
  CMat T = -H_;
  T.diagonal().array() += s;
  CVec x = bt_;
  const double scale = std::max(T.cwiseAbs().maxCoeff(), 1e-300);
  // Gaussian elimination with partial pivoting; only the subdiagonal needs eliminating.
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (std::abs(T(k + 1, k)) > std::abs(T(k, k))) {
      for (Eigen::Index j = k; j < n; ++j) std::swap(T(k, j), T(k + 1, j));
      std::swap(x[k], x[k + 1]);
    }
    const cplx piv = T(k, k);
    if (std::abs(piv) <= kEps * scale) fail(ErrorKind::SingularShift, "shift is numerically a pole");
    const cplx f = T(k + 1, k) / piv;
    if (f != cplx(0.0)) {
      for (Eigen::Index j = k; j < n; ++j) T(k + 1, j) -= f * T(k, j);
      x[k + 1] -= f * x[k];
    }
  }
  if (std::abs(T(n - 1, n - 1)) <= kEps * scale) fail(ErrorKind::SingularShift, "shift is numerically a pole");
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    cplx acc = x[i];
    for (Eigen::Index j = i + 1; j < n; ++j) acc -= T(i, j) * x[j];
    x[i] = acc / T(i, i);
  }
  return (ct_.transpose() * x)(0) + d_;
}

}  // namespace mor
