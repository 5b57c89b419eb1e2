#pragma once

#include "mor/projection.hpp"

namespace mor {

/// One-parameter family of order-r interpolants sharing the 2r Hermite
/// conditions of an interpolatory core:
///
///   H_r(s, d) = H_r^0(s) + d (G1(s) - 1)(G2(s) - 1) / (1 - d G3(s))
///
/// with G1 = u^T (sE_r - A_r)^{-1} b_r, G2 = c_r^T (sE_r - A_r)^{-1} w and
/// G3 = u^T (sE_r - A_r)^{-1} w, where u and w are the core's ones vectors.
class DrFamily {
 public:
  /// `core` must be real (see realify) with dr = 0.
  explicit DrFamily(const ReducedModel& core);

  struct Terms {
    cplx h0, g1, g2, g3;
  };
  /// One factorization of (sE_r - A_r) shared by the four solves.
  Terms terms(cplx s) const;

  const ReducedModel& core() const noexcept { return core_; }
  int order() const noexcept { return static_cast<int>(br_.size()); }
  const Mat& Er() const noexcept { return Er_; }
  const Mat& Ar() const noexcept { return Ar_; }
  const Vec& br() const noexcept { return br_; }
  const Vec& cr() const noexcept { return cr_; }
  const Vec& u_ones() const noexcept { return u_; }
  const Vec& w_ones() const noexcept { return w_; }

 private:
  ReducedModel core_;
  Mat Er_, Ar_;
  Vec br_, cr_, u_, w_;
};

struct DrCandidate {
  double dr = 0.0;
  bool stable = false;
  double margin = 0.0;  // -max Re(pole) of the perturbed pencil
};

/// FamilyPole when 1 - dr G3(s) vanishes.
cplx eval_family(const DrFamily& fam, cplx s, double dr);

/// Order-r realization (c_r - dr u)^T (sE_r - A_r - dr w u^T)^{-1} (b_r - dr w) + dr.
ReducedModel assemble_statespace(const DrFamily& fam, double dr);

/// dr placing one extra interpolation point at s_extra > 0.
double explicit_dr(const DrFamily& fam, const LtiSystem& target, double s_extra);

/// Stability of the perturbed pencil; stable iff every pole has Re < -margin.
DrCandidate stability_of(const DrFamily& fam, double dr, double margin);

/// H_r(., dr) - H_r^0 as a 2r-state block realization.
DenseModel increment_model(const DrFamily& fam, double dr);

}  // namespace mor
