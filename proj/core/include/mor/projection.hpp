#pragma once

#include <vector>

#include "mor/statespace.hpp"

namespace mor {

enum class ColumnScaling { none, unit_column };

/// Primitive rational Krylov bases for a conjugate-closed shift set.
///
/// Column i of V is v_scales[i] * (s_i E - A)^{-1} b and column i of W is
/// w_scales[i] * (s_i E - A)^{-T} c. The Hermite samples H(s_i), H'(s_i)
/// fall out of the same solves and are kept alongside.
struct InterpolationBasis {
  std::vector<cplx> points;
  CMat V, W;
  Vec v_scales, w_scales;
  std::vector<TransferSample> samples;

  int size() const noexcept { return static_cast<int>(points.size()); }
};

/// Reduced realization W^T (sE - A) V with its generalized ones vectors.
///
/// `u_ones` multiplies the reduced state from the left (paired with c_r),
/// `w_ones` enters on the input side (paired with b_r). Both equal the
/// all-ones vector for an unscaled basis.
struct ReducedModel {
  CMat Er, Ar;
  CVec br, cr;
  double dr = 0.0;
  CVec u_ones, w_ones;
  std::vector<cplx> points;

  int order() const noexcept { return static_cast<int>(br.size()); }
  DenseModel realization() const;
  /// Real dense system; NotConjugateClosed if the realization is not real.
  LtiSystem to_system() const;
};

cplx eval(const ReducedModel& m, cplx s);
TransferSample eval_deriv(const ReducedModel& m, cplx s);
std::vector<cplx> poles(const ReducedModel& m);

/// Orders a conjugate-closed set so each pair sits adjacent with the
/// positive-imaginary member first: ascending |Im|, then Re. Partners within
/// 1e-8 relative are snapped to exact conjugates. Throws NotConjugateClosed
/// when a partner is missing.
std::vector<cplx> canonical_shift_order(std::vector<cplx> points);

/// RankDeficient on coincident shifts or when V/W lose column rank.
InterpolationBasis build_basis(const LtiSystem& sys, const std::vector<cplx>& points,
                               ColumnScaling scaling = ColumnScaling::unit_column);

/// SingularPencil when E_r is numerically singular.
ReducedModel project(const LtiSystem& sys, const InterpolationBasis& basis);

/// Real equivalent realization obtained by rotating every conjugate column
/// pair into its real and imaginary parts.
ReducedModel realify(const ReducedModel& model);

}  // namespace mor
