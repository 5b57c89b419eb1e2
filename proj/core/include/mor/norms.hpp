#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mor/statespace.hpp"

namespace mor {

enum class NormMethod { level_set, sampled };

std::string_view to_string(NormMethod m);

struct HinfResult {
  double value = 0.0;
  double peak_frequency = 0.0;
  NormMethod method = NormMethod::level_set;
  int iterations = 0;
};

/// Peak gain over the imaginary axis with no stability check. Level-set
/// iteration on the imaginary eigenvalues of the Hamiltonian of the
/// standard-form realization; stops once the level is within rel_tol of the
/// best gain seen.
HinfResult linf_norm(const DenseModel& m, double rel_tol = 1e-9);

/// UnstableSystem if any pole has Re >= 0; DimensionTooLarge above `cap`.
HinfResult hinf_norm(const LtiSystem& sys, double rel_tol = 1e-9, int cap = kDefaultDenseCap);
HinfResult hinf_norm(const DenseModel& m, double rel_tol = 1e-9);

/// 500 log-spaced points on [1e-8, 10].
FrequencyGrid default_sampled_grid();

/// Grid maximum of `gain` followed by 30 golden-section iterations around
/// the argmax. A lower bound on the peak, not certified.
HinfResult sampled_peak(const std::function<double(double)>& gain, const FrequencyGrid& grid, int refine_iters = 30);
/// As above with the grid gains already known (grid_gains[i] at grid point i).
HinfResult sampled_peak(const std::function<double(double)>& gain, const FrequencyGrid& grid,
                        const std::vector<double>& grid_gains, int refine_iters = 30);

HinfResult hinf_norm_sampled(const LtiSystem& sys, const FrequencyGrid& grid = default_sampled_grid());

/// NonProper if d != 0, UnstableSystem if not stable.
double h2_norm(const LtiSystem& sys, int cap = kDefaultDenseCap);

struct HankelSpectrum {
  std::vector<double> sigmas;  // descending

  /// sigma_i with 1-based i; 0 beyond the order.
  double sigma(int i) const { return i >= 1 && i <= static_cast<int>(sigmas.size()) ? sigmas[static_cast<std::size_t>(i - 1)] : 0.0; }
};

HankelSpectrum hankel_singular_values(const LtiSystem& sys, int cap = kDefaultDenseCap);

struct ErrorAndBound {
  double abs_error = 0.0;
  double rel_error = 0.0;
  double full_norm = 0.0;
  double lower_bound = 0.0;  // sigma_{r+1} / ||H||
  NormMethod method = NormMethod::level_set;
  double peak_frequency = 0.0;
  bool bound_respected = true;
};

struct ErrorBoundOptions {
  std::optional<HankelSpectrum> hsv;  // computed at desk scale when absent
  std::optional<double> full_norm;    // ||H||, computed when absent
  bool force_sampled = false;
  std::optional<FrequencyGrid> grid;  // sampled grid, default_sampled_grid() when absent
  int cap = kDefaultDenseCap;
  double tol = 1e-8;
};

/// ||H - H_r|| / ||H|| together with sigma_{r+1} / ||H||. Falls back to the
/// sampled norm (flagged) when n + r exceeds the cap or sampling is forced;
/// the bound is then 0 unless Hankel values are supplied.
ErrorAndBound relative_error_and_bound(const LtiSystem& sys, const LtiSystem& reduced, int r,
                                       const ErrorBoundOptions& opt = {});

}  // namespace mor
