#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mor/projection.hpp"

namespace mor {

enum class ShiftInit { given_list, log_spaced_in_spectrum_bounds, random_in_spectrum_bounds };

struct IrkaConfig {
  int r = 2;
  double tol = 1e-6;
  int max_iters = 100;
  ShiftInit init = ShiftInit::log_spaced_in_spectrum_bounds;
  std::vector<cplx> initial_shifts;  // used with ShiftInit::given_list
  int stagnation_window = 10;
  std::uint64_t seed = 0;  // used with ShiftInit::random_in_spectrum_bounds
  ColumnScaling scaling = ColumnScaling::unit_column;
};

/// Every Hermite sample (s, H(s), H'(s)) produced while building bases.
struct SampleLog {
  std::vector<TransferSample> entries;
  int iterations_used = 0;  // q: number of bases built
  int raw_count = 0;        // q * r, before exact-duplicate removal
};

struct IrkaTraceRecord {
  int iteration = 0;
  std::vector<cplx> shifts;
  double shift_change = 0.0;
  double h2_residual = 0.0;
  bool reflected = false;
};

struct IrkaResult {
  ReducedModel model;  // H_r^0: realified, dr = 0
  InterpolationBasis basis;
  SampleLog log;
  bool converged = false;
  double final_shift_change = 0.0;
  int iterations = 0;
  bool reflection_triggered = false;
  bool stagnated = false;
  bool rank_loss = false;
  /// Not converged and the last iterate was unstable: model and basis are
  /// the stable iterate with the smallest H2-condition residual.
  bool fell_back_to_stable = false;
  std::vector<IrkaTraceRecord> trace;
};

using IrkaObserver = std::function<void(const IrkaTraceRecord&)>;

/// max_i min_j |new_i - old_j| / |old_j|
double relative_shift_change(const std::vector<cplx>& next, const std::vector<cplx>& prev);

/// Mirror reduced poles into the open right half-plane: s = |Re(lambda)| - j Im(lambda).
std::vector<cplx> mirrored_shifts(const std::vector<cplx>& reduced_poles, bool* reflected = nullptr);

/// Magnitude bounds of the spectrum of (A, E) from short Arnoldi runs on
/// E^{-1}A and A^{-1}E.
std::pair<double, double> spectrum_magnitude_bounds(const LtiSystem& sys, int steps = 30);

std::vector<cplx> initial_shifts(const LtiSystem& sys, const IrkaConfig& cfg);

IrkaResult run_irka(const LtiSystem& sys, const IrkaConfig& cfg, const IrkaObserver& observer = {});

struct H2ConditionReport {
  std::vector<cplx> points;  // -lambda_hat
  std::vector<double> value_residuals;
  std::vector<double> derivative_residuals;
  double max_value_residual = 0.0;
  double max_derivative_residual = 0.0;
  bool passed = false;
};

/// Residuals of H(-l) = H_r(-l), H'(-l) = H_r'(-l) at the mirrored reduced
/// poles, each relative to 1 + |H(-l)|. RepeatedPoles if two reduced poles
/// are within 1e-10.
H2ConditionReport check_h2_conditions(const LtiSystem& sys, const ReducedModel& model, double tol);

}  // namespace mor
