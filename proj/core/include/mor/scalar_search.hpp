#pragma once

#include <functional>
#include <vector>

namespace mor {

struct ScalarProbe {
  double x = 0.0;
  double value = 0.0;  // +inf for rejected points
  bool feasible = false;
};

/// Bracket scan over 0 and +-scale * rel_grid, outward doubling while an
/// edge probe keeps improving, then golden-section refinement between the
/// neighbours of the best probe.
struct ScalarSearchConfig {
  std::vector<double> rel_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  double rel_tol = 1e-4;
  int max_extensions = 30;
  int max_refinements = 200;
  double tie_tol = 1e-12;
  bool parallel_scan = true;
};

struct ScalarSearchResult {
  double x = 0.0;
  double value = 0.0;
  double value_at_zero = 0.0;
  int rejected = 0;
  std::vector<ScalarProbe> trace;  // in evaluation order, 0 first

  bool any_feasible() const noexcept;
};

/// Minimizes `objective` (returning +inf for infeasible x). x = 0 is always
/// probed first, so the result never exceeds the value at 0. Among values
/// equal within tie_tol the smaller |x| wins. The objective must be safe to
/// call concurrently when parallel_scan is set.
ScalarSearchResult minimize_scalar(const std::function<double(double)>& objective, double scale,
                                   const ScalarSearchConfig& cfg = {});

}  // namespace mor
