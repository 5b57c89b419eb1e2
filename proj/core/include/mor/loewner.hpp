#pragma once

#include <optional>
#include <vector>

#include "mor/projection.hpp"

namespace mor {

/// Loewner and shifted Loewner matrices of Hermite data (s_i, F(s_i), F'(s_i)):
///
///   L_ij = (F_i - F_j) / (s_i - s_j),        L_ii = F'(s_i)
///   M_ij = (s_i F_i - s_j F_j) / (s_i - s_j), M_ii = F(s_i) + s_i F'(s_i)
///
/// When the data is closed under conjugation, Lr, Mr, Zr hold the real
/// congruence X^T L X, X^T M X, X^T Z with X unitary, pairing each s with
/// conj(s). The pivot pencil is then the real |s_p| Lr - Mr.
struct LoewnerPencil {
  std::vector<cplx> points;
  CMat L, M;
  CVec Z;
  Mat Lr, Mr;
  Vec Zr;
  Vec singular_values;  // of the pivot pencil
  int pivot_index = -1;

  int size() const noexcept { return static_cast<int>(points.size()); }
  bool is_real() const noexcept { return Lr.size() > 0; }
};

/// DuplicatePoints if two points are closer than 1e-12 relative. The pivot
/// is chosen by choose_pivot(p, pivot_tol).
LoewnerPencil build_pencil(const std::vector<TransferSample>& samples, double pivot_tol = 1e-5);

/// Keeps the first of any group of points within `rel_gap` of each other.
std::vector<TransferSample> merge_near_duplicates(const std::vector<TransferSample>& samples, double rel_gap = 1e-12);

/// Pivot among the smallest, median and largest |s_i|: the one whose pencil
/// s_i L - M keeps the most singular values above tol * sigma_1, ties going
/// to the larger ||s_i L - M||_F. Real pencils probe |s_i| Lr - Mr.
int choose_pivot(const LoewnerPencil& p, double tol = 1e-5);

struct RankReport {
  int numerical_rank = 0;      // rank of s_p L - M at the pivot
  int rank_row_block = 0;      // rank [L M]
  int rank_column_block = 0;   // rank [L; M]
  std::vector<int> probed;     // indices checked
  std::vector<int> pencil_ranks;
  bool satisfied = false;
};

/// Numerical ranks count singular values above tol * sigma_max. With
/// `all_points` every s_i is probed instead of the three-pivot set.
RankReport check_rank_condition(const LoewnerPencil& p, double tol, bool all_points = false);

struct SurrogateOrder {
  /// Fixed order, or automatic when unset: first singular value below tol * sigma_1.
  std::optional<int> fixed;
  double tol = 1e-5;
  std::optional<int> cap;

  static SurrogateOrder automatic(double tol = 1e-5, std::optional<int> cap = std::nullopt) { return {std::nullopt, tol, cap}; }
  static SurrogateOrder exactly(int k) { return {k, 1e-5, std::nullopt}; }
};

/// F_k(s) = c_k^T (s E_k - A_k)^{-1} b_k from a truncated SVD of s_p L - M.
struct Surrogate {
  int order = 0;
  CMat Ek, Ak;
  CVec bk, ck;
  Vec singular_values;
  Vec truncation_tail;
  int pivot_index = -1;

  DenseModel realization() const { return DenseModel{Ek, Ak, bk, ck, cplx(0.0)}; }
};

/// SingularEk if E_k cannot be factored.
Surrogate extract_surrogate(const LoewnerPencil& p, const SurrogateOrder& order);

cplx eval(const Surrogate& s, cplx z);

struct SurrogateErrorReport {
  double max_deviation = 0.0;
  double at_frequency = 0.0;
  double max_reference = 0.0;  // max |H - H_r^0| over the grid
};

/// max over the grid of |F_k(jw) - (H(jw) - H_r^0(jw))|.
SurrogateErrorReport surrogate_error_report(const Surrogate& surr, const LtiSystem& sys, const ReducedModel& core,
                                            const FrequencyGrid& grid);

}  // namespace mor
