#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mor/drfamily.hpp"
#include "mor/irka.hpp"
#include "mor/loewner.hpp"
#include "mor/norms.hpp"
#include "mor/scalar_search.hpp"

namespace mor {

enum class Step2Mode { surrogate, exact, both };

std::string_view to_string(Step2Mode m);

struct IhaConfig {
  IrkaConfig irka;
  Step2Mode step2_mode = Step2Mode::surrogate;
  ScalarSearchConfig dr_bracket_policy;
  double stability_margin = 0.0;
  SurrogateOrder surrogate_k = SurrogateOrder::automatic();
  /// Samples closer than this (relative) are merged before building the pencil.
  double merge_gap = 1e-8;
  double hinf_tol = 1e-9;
  int dense_cap = kDefaultDenseCap;
  /// Exact-mode grid when n + r exceeds the dense cap.
  std::optional<FrequencyGrid> sampled_grid;
};

struct DrProbe {
  double dr = 0.0;
  double value = 0.0;
  bool stable = false;
};

struct DrOptimization {
  double dr_star = 0.0;
  double value = 0.0;
  double value_at_zero = 0.0;
  int rejected = 0;
  bool no_stable_dr = false;
  NormMethod method = NormMethod::level_set;
  std::vector<DrProbe> trace;
};

/// Objective of the d_r search: either the Loewner surrogate of H - H_r^0
/// (each probe is an order k + 2r residual norm) or the full error system.
class DrObjective {
 public:
  static DrObjective surrogate(const Surrogate& fk, double rel_tol = 1e-9);
  /// Certified norm of H - H_r(d) if n + r <= cap, else sampled on `grid`.
  static DrObjective exact(const LtiSystem& sys, int cap = kDefaultDenseCap, double rel_tol = 1e-9,
                           const std::optional<FrequencyGrid>& grid = std::nullopt);

  /// Value for a stable member of the family; no stability check here.
  double operator()(const DrFamily& fam, double dr) const;
  NormMethod method() const noexcept { return method_; }

 private:
  enum class Kind { surrogate, exact_dense, exact_sampled };
  Kind kind_ = Kind::surrogate;
  NormMethod method_ = NormMethod::level_set;
  double rel_tol_ = 1e-9;
  DenseModel fk_;
  DenseModel full_;
  LtiSystem sys_;
  std::optional<FrequencyGrid> grid_;
  std::vector<cplx> grid_values_;
};

/// Scalar minimization over d_r. Members whose poles violate the margin are
/// logged with value +inf. NoStableDr is reported through the flag (d_r = 0).
DrOptimization optimize_dr(const DrFamily& fam, const DrObjective& objective, double margin,
                           const ScalarSearchConfig& policy = {});

struct IhaResult {
  ReducedModel model;  // H_r* = H_r(., d_r*)
  double dr_star = 0.0;
  double objective_value = 0.0;
  double objective_at_zero = 0.0;
  IrkaResult irka;
  Surrogate surrogate;
  int sample_count = 0;  // l after merging
  bool degenerate = false;  // F == 0, step 2 skipped
  DrOptimization surrogate_step;
  std::optional<DrOptimization> exact_step;
  int rejected_dr = 0;
  std::vector<std::string> warnings;
};

/// IRKA, Loewner surrogate of H - H_r^0 from the harvested samples, d_r
/// search, and assembly. A non-converged IRKA or an all-rejected search are
/// recorded in `warnings` rather than thrown.
IhaResult run_iha(const LtiSystem& sys, const IhaConfig& cfg);

/// Hermite data of F = H - H_r^0 at every logged sample.
std::vector<TransferSample> error_samples(const SampleLog& log, const ReducedModel& core);

struct TrefethenDiagnostics {
  double circularity = 1.0;  // min |e| / max |e| on the grid
  bool degenerate = false;   // e == 0 on the grid; circularity set to 1 by convention
  int rhp_interp_count = -1;
  bool contour_converged = false;
  double contour_radius = 0.0;
  double sampled_min = 0.0;
  double certified_max = 0.0;
  NormMethod max_method = NormMethod::level_set;
};

/// Circularity of the error curve, number of zeros of H - H_r in the open
/// right half-plane (winding number on a growing semicircle) and the
/// min/max sandwich.
TrefethenDiagnostics trefethen_diagnostics(const LtiSystem& sys, const ReducedModel& model, const FrequencyGrid& grid,
                                           int cap = kDefaultDenseCap);

/// Zeros minus poles of f inside the right half-disc of radius R, from the
/// accumulated phase along its boundary. Empty if the winding number does
/// not settle to an integer.
std::optional<int> rhp_winding_count(const std::function<cplx(cplx)>& f, double R);

}  // namespace mor
