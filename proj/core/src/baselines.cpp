#include "mor/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "mor/lyapunov.hpp"

namespace mor {

namespace {

struct SquareRoot {
  StandardForm f;
  Mat T, W;  // right and left projectors, W^T T = I
  Vec sigmas;
};

SquareRoot square_root(const LtiSystem& sys, int r, int cap) {
  if (sys.order() > cap) fail(ErrorKind::DimensionTooLarge, "order exceeds the dense cap");
  for (const cplx& p : poles(sys, cap))
    if (!(p.real() < 0.0)) fail(ErrorKind::UnstableSystem, "balanced truncation needs a stable system");
  SquareRoot s;
  s.f = standard_form(sys, cap);
  const Mat Lp = lyapunov_factor(s.f.A, s.f.b), Lq = lyapunov_factor(Mat(s.f.A.transpose()), s.f.c);
  Eigen::JacobiSVD<Mat> svd(Lq.transpose() * Lp, Eigen::ComputeFullU | Eigen::ComputeFullV);
  s.sigmas = svd.singularValues();
  const Vec isq = s.sigmas.head(r).cwiseSqrt().cwiseInverse();
  s.T = Lp * svd.matrixV().leftCols(r) * isq.asDiagonal();
  s.W = Lq * svd.matrixU().leftCols(r) * isq.asDiagonal();
  return s;
}

int numerical_order(const LtiSystem& sys, int r, int cap) {
  const HankelSpectrum h = hankel_singular_values(sys, cap);
  int keep = 0;
  for (double s : h.sigmas)
    if (!h.sigmas.empty() && s > 1e-14 * h.sigmas.front()) ++keep;
  return std::max(1, std::min(r, keep));
}

}  // namespace

BtResult balanced_truncation(const LtiSystem& sys, int r, int cap) {
  const int n = sys.order();
  if (r < 1 || r > n) fail(ErrorKind::InvalidInput, "balanced truncation order must satisfy 1 <= r <= n");
  const int rr = numerical_order(sys, r, cap);
  const SquareRoot s = square_root(sys, rr, cap);
  BtResult out;
  out.requested_order = r;
  out.sigmas.sigmas.assign(s.sigmas.data(), s.sigmas.data() + s.sigmas.size());
  for (int i = r; i < s.sigmas.size(); ++i) out.error_bound += 2.0 * s.sigmas(i);
  ReducedModel& m = out.model;
  m.Er = CMat::Identity(rr, rr);
  m.Ar = (s.W.transpose() * s.f.A * s.T).cast<cplx>();
  m.br = (s.W.transpose() * s.f.b).cast<cplx>();
  m.cr = (s.T.transpose() * s.f.c).cast<cplx>();
  m.dr = 0.0;
  return out;
}

Balanced balanced_realization(const LtiSystem& sys, int cap) {
  const int rr = numerical_order(sys, sys.order(), cap);
  const SquareRoot s = square_root(sys, rr, cap);
  return {s.W.transpose() * s.f.A * s.T, s.W.transpose() * s.f.b, s.T.transpose() * s.f.c, s.sigmas.head(rr)};
}

MbtResult modified_bt(const LtiSystem& sys, int r, const ScalarSearchConfig& search, int cap) {
  MbtResult out;
  out.bt = balanced_truncation(sys, r, cap);
  DenseModel err = block_difference(to_dense_model(sys, cap), out.bt.model.realization());
  const cplx d0 = err.d;
  auto objective = [&](double dr) {
    DenseModel e = err;
    e.d = d0 - dr;
    return hinf_norm(e).value;
  };
  const double e0 = objective(0.0);
  out.search = minimize_scalar(objective, 2.0 * e0, search);
  out.dr_star = out.search.x;
  out.hinf_error = out.search.value;
  out.hinf_error_at_zero = out.search.value_at_zero;
  out.bt.model.dr = out.dr_star;
  return out;
}

}  // namespace mor
