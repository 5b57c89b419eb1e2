#pragma once

#include "mor/norms.hpp"
#include "mor/projection.hpp"
#include "mor/scalar_search.hpp"

namespace mor {

struct BtResult {
  ReducedModel model;  // E_r = I, d_r = 0
  HankelSpectrum sigmas;
  double error_bound = 0.0;  // 2 * sum_{i>r} sigma_i
  int requested_order = 0;
};

/// Square-root balanced truncation. The order is clamped to the number of
/// Hankel singular values above 1e-14 * sigma_1 (at least 1).
BtResult balanced_truncation(const LtiSystem& sys, int r, int cap = kDefaultDenseCap);

/// Balanced realization of order n with the (common, diagonal) Gramian.
struct Balanced {
  Mat A;
  Vec b, c;
  Vec sigmas;
};
Balanced balanced_realization(const LtiSystem& sys, int cap = kDefaultDenseCap);

struct MbtResult {
  BtResult bt;
  double dr_star = 0.0;
  double hinf_error = 0.0;
  double hinf_error_at_zero = 0.0;
  ScalarSearchResult search;
};

/// BT followed by a constant feed-forward shift minimizing ||H - (H_BT + d_r)||.
/// The scan spans +-2 ||H - H_BT||.
MbtResult modified_bt(const LtiSystem& sys, int r, const ScalarSearchConfig& search = {}, int cap = kDefaultDenseCap);

}  // namespace mor
