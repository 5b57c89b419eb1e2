#include "mor/lyapunov.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace mor {

CMat solve_lyapunov(const CMat& A, const CMat& Q) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) fail(ErrorKind::DimensionMismatch, "Lyapunov operands have inconsistent sizes");
  if (n == 0) return CMat(0, 0);
  Eigen::ComplexSchur<CMat> schur(A);
  if (schur.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "Schur decomposition did not converge");
  const CMat& T = schur.matrixT();
  const CMat& U = schur.matrixU();
  const CMat C = -(U.adjoint() * Q * U);

  // T Y + Y T^H = C, column by column from the right.
  CMat Y = CMat::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    CVec rhs = C.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(T(j, k)) * Y.col(k);
    CMat shifted = T;
    shifted.diagonal().array() += std::conj(T(j, j));
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(shifted(i, i)) == 0.0) fail(ErrorKind::UnstableSystem, "Lyapunov operator is singular (eigenvalues mirror each other)");
    Y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return U * Y * U.adjoint();
}

Mat solve_lyapunov(const Mat& A, const Mat& Q) {
  const CMat X = solve_lyapunov(CMat(A.cast<cplx>()), CMat(Q.cast<cplx>()));
  Mat R = X.real();
  return 0.5 * (R + R.transpose());
}

StandardForm standard_form(const LtiSystem& sys, int cap) {
  StandardForm f;
  const Mat E = sys.E_dense(cap);
  const Mat A = sys.A_dense(cap);
  f.c = sys.c();
  f.d = sys.d();
  if (E.isIdentity(0.0)) {
    f.A = A;
    f.b = sys.b();
  } else {
    Eigen::PartialPivLU<Mat> lu(E);
    f.A = lu.solve(A);
    f.b = lu.solve(sys.b());
  }
  return f;
}

Gramians gramians(const LtiSystem& sys, int cap) {
  const StandardForm f = standard_form(sys, cap);
  Gramians g;
  g.P = solve_lyapunov(f.A, Mat(f.b * f.b.transpose()));
  g.Q = solve_lyapunov(Mat(f.A.transpose()), Mat(f.c * f.c.transpose()));
  return g;
}

Mat psd_factor(const Mat& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.transpose()));
  Vec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal();
}

Mat lyapunov_factor(const Mat& A, const Vec& b) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n) fail(ErrorKind::DimensionMismatch, "Lyapunov operands have inconsistent sizes");
  if (n == 0) return Mat(0, 0);
  Eigen::ComplexSchur<CMat> schur(A.cast<cplx>());
  if (schur.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "Schur decomposition did not converge");
  const CMat& T = schur.matrixT();
  CVec beta = schur.matrixU().adjoint() * b.cast<cplx>();

  // Upper triangular U with T U U^H + U U^H T^H + beta beta^H = 0, last column first.
  CMat U = CMat::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const cplx lam = T(j, j);
    if (!(lam.real() < 0.0)) fail(ErrorKind::UnstableSystem, "Lyapunov factor needs a stable A");
    const double mu = std::abs(beta(j)) / std::sqrt(-2.0 * lam.real());
    U(j, j) = mu;
    if (j == 0 || mu == 0.0) continue;
    const cplx w = beta(j) / mu;
    CMat shifted = T.topLeftCorner(j, j);
    shifted.diagonal().array() += std::conj(lam);
    const CVec rhs = -(T.col(j).head(j) * mu + beta.head(j) * std::conj(w));
    const CVec u = shifted.triangularView<Eigen::Upper>().solve(rhs);
    U.col(j).head(j) = u;
    beta.head(j) -= u * w;
  }

  // F F^H is real, so [Re F, Im F] is a real factor; compress it to n columns.
  const CMat F = schur.matrixU() * U;
  Mat G(2 * n, n);
  G << F.real().transpose(), F.imag().transpose();
  Eigen::HouseholderQR<Mat> qr(G);
  return Mat(qr.matrixQR().topRows(n).triangularView<Eigen::Upper>()).transpose();
}

}  // namespace mor
