#include "mor/drfamily.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mor {

DrFamily::DrFamily(const ReducedModel& core) : core_(core) {
  if (core.order() < 1) fail(ErrorKind::InvalidInput, "family core must have order >= 1");
  if (core.dr != 0.0) fail(ErrorKind::InvalidInput, "family core must have dr = 0");
  const DenseModel m = core.realization();
  if (!is_real(m, 1e-10) || core.u_ones.imag().cwiseAbs().maxCoeff() > 0.0 || core.w_ones.imag().cwiseAbs().maxCoeff() > 0.0)
    fail(ErrorKind::NotConjugateClosed, "family core must be a real realization");
  Er_ = core.Er.real();
  Ar_ = core.Ar.real();
  br_ = core.br.real();
  cr_ = core.cr.real();
  u_ = core.u_ones.real();
  w_ = core.w_ones.real();
}

DrFamily::Terms DrFamily::terms(cplx s) const {
  const CMat M = s * Er_.cast<cplx>() - Ar_.cast<cplx>();
  Eigen::PartialPivLU<CMat> lu(M);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon()))
    fail(ErrorKind::SingularShift, "s is a pole of the family core");
  const CVec x = lu.solve(br_.cast<cplx>());
  const CVec z = lu.solve(w_.cast<cplx>());
  const CVec uc = u_.cast<cplx>(), cc = cr_.cast<cplx>();
  return {(cc.transpose() * x)(0), (uc.transpose() * x)(0), (cc.transpose() * z)(0), (uc.transpose() * z)(0)};
}

cplx eval_family(const DrFamily& fam, cplx s, double dr) {
  const auto t = fam.terms(s);
  if (dr == 0.0) return t.h0;
  const cplx den = 1.0 - dr * t.g3;
  if (std::abs(den) < 1e-14 * (1.0 + std::abs(dr * t.g3))) fail(ErrorKind::FamilyPole, "1 - dr G3(s) vanishes");
  return t.h0 + dr * (t.g1 - 1.0) * (t.g2 - 1.0) / den;
}

ReducedModel assemble_statespace(const DrFamily& fam, double dr) {
  ReducedModel m = fam.core();
  if (dr == 0.0) return m;
  const Vec& u = fam.u_ones();
  const Vec& w = fam.w_ones();
  m.Ar = (fam.Ar() + dr * w * u.transpose()).cast<cplx>();
  m.br = (fam.br() - dr * w).cast<cplx>();
  m.cr = (fam.cr() - dr * u).cast<cplx>();
  m.dr = dr;
  return m;
}

double explicit_dr(const DrFamily& fam, const LtiSystem& target, double s_extra) {
  if (!(s_extra > 0.0)) fail(ErrorKind::InvalidInput, "extra interpolation point must be in the open right half-plane");
  for (const cplx& p : fam.core().points)
    if (std::abs(p - cplx(s_extra)) < 1e-10 * (1.0 + s_extra))
      fail(ErrorKind::InvalidInput, "extra point coincides with an interpolation point");
  const cplx s(s_extra, 0.0);
  const cplx h = eval(target, s);
  const auto t = fam.terms(s);
  const cplx num = h - t.h0;
  if (std::abs(num) <= 1e-15 * (1.0 + std::abs(h))) return 0.0;
  const cplx a = (t.g1 - 1.0) * (t.g2 - 1.0), b = t.g3 * num;
  const cplx den = a + b;
  if (std::abs(den) < 1e-14 * std::max(std::abs(a) + std::abs(b), 1e-300))
    fail(ErrorKind::DegenerateDenominator, "denominator of the explicit dr formula vanishes");
  const double dr = (num / den).real();
  const cplx check = eval_family(fam, s, dr);
  if (std::abs(check - h) > 1e-8 * std::max(std::abs(h), 1e-300) + 1e-14)
    fail(ErrorKind::DegenerateDenominator, "explicit dr failed post-verification");
  return dr;
}

DrCandidate stability_of(const DrFamily& fam, double dr, double margin) {
  const ReducedModel m = assemble_statespace(fam, dr);
  double worst = -std::numeric_limits<double>::infinity();
  for (const cplx& p : poles(m)) worst = std::max(worst, p.real());
  return {dr, worst < -margin, -worst};
}

DenseModel increment_model(const DrFamily& fam, double dr) {
  return block_difference(assemble_statespace(fam, dr).realization(), fam.core().realization());
}

}  // namespace mor
