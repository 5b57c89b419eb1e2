#pragma once

#include "mor/statespace.hpp"

namespace mor {

/// Solves A X + X A^H + Q = 0 for a stable A by the Bartels-Stewart method
/// on the complex Schur form of A.
CMat solve_lyapunov(const CMat& A, const CMat& Q);

/// Real symmetric solution of A X + X A^T + Q = 0.
Mat solve_lyapunov(const Mat& A, const Mat& Q);

/// Standard-form data (E^{-1}A, E^{-1}b, c) of a dense-capped system.
struct StandardForm {
  Mat A;
  Vec b, c;
  double d = 0.0;
};
StandardForm standard_form(const LtiSystem& sys, int cap = kDefaultDenseCap);

/// Gramians of the (E, A, b, c) realization in standard coordinates:
/// P solves A P E^T + E P A^T + b b^T = 0 and Q_s = E^T Q E solves the
/// observability equation for (E^{-1}A, c).
struct Gramians {
  Mat P, Q;
};
Gramians gramians(const LtiSystem& sys, int cap = kDefaultDenseCap);

/// Symmetric positive semidefinite factor F with X = F F^T.
Mat psd_factor(const Mat& X);

/// Square factor F with F F^T = P, where A P + P A^T + b b^T = 0 and A is
/// stable. Computed without forming P (Hammarling), so small singular
/// values of F keep their relative accuracy.
Mat lyapunov_factor(const Mat& A, const Vec& b);

}  // namespace mor
