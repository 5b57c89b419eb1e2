#include "mor/scalar_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mor/parallel.hpp"

namespace mor {

namespace {

constexpr double kGolden = 0.6180339887498949;

bool better(const ScalarProbe& a, const ScalarProbe& b, double tie_tol) {
  if (!a.feasible) return false;
  if (!b.feasible) return true;
  const double slack = tie_tol * std::max(1.0, std::max(std::abs(a.value), std::abs(b.value)));
  if (a.value < b.value - slack) return true;
  if (b.value < a.value - slack) return false;
  return std::abs(a.x) < std::abs(b.x);
}

}  // namespace

bool ScalarSearchResult::any_feasible() const noexcept {
  return std::any_of(trace.begin(), trace.end(), [](const ScalarProbe& p) { return p.feasible; });
}

ScalarSearchResult minimize_scalar(const std::function<double(double)>& objective, double scale, const ScalarSearchConfig& cfg) {
  ScalarSearchResult res;
  auto probe = [&](double x) {
    const double v = objective(x);
    return ScalarProbe{x, std::isfinite(v) ? v : std::numeric_limits<double>::infinity(), std::isfinite(v)};
  };
  auto record = [&](const ScalarProbe& p) {
    res.trace.push_back(p);
    if (!p.feasible) ++res.rejected;
  };

  const ScalarProbe zero = probe(0.0);
  record(zero);
  res.value_at_zero = zero.value;
  ScalarProbe best = zero;
  const auto finish = [&] {
    res.x = best.x;
    res.value = best.value;
    return res;
  };
  if (zero.feasible && zero.value == 0.0) return finish();
  if (!(scale > 0.0) || !std::isfinite(scale)) return finish();

  std::vector<double> xs;
  for (auto it = cfg.rel_grid.rbegin(); it != cfg.rel_grid.rend(); ++it) xs.push_back(-scale * *it);
  for (double g : cfg.rel_grid) xs.push_back(scale * g);
  std::vector<ScalarProbe> scan;
  if (cfg.parallel_scan) {
    scan = parallel_map(xs.size(), [&](std::size_t i) { return probe(xs[i]); });
  } else {
    for (double x : xs) scan.push_back(probe(x));
  }
  for (const auto& p : scan) record(p);

  // Sorted view including 0.
  std::vector<ScalarProbe> line = scan;
  line.push_back(zero);
  std::sort(line.begin(), line.end(), [](const ScalarProbe& a, const ScalarProbe& b) { return a.x < b.x; });
  auto best_index = [&] {
    std::size_t k = 0;
    for (std::size_t i = 1; i < line.size(); ++i)
      if (better(line[i], line[k], cfg.tie_tol)) k = i;
    return k;
  };
  std::size_t k = best_index();

  // Extend outward while the edge keeps improving.
  for (int e = 0; e < cfg.max_extensions && line[k].feasible && (k == 0 || k + 1 == line.size()); ++e) {
    const bool left = k == 0;
    const ScalarProbe p = probe(2.0 * line[k].x);
    record(p);
    if (left) {
      line.insert(line.begin(), p);
      if (!better(p, line[1], cfg.tie_tol)) break;
      k = 0;
    } else {
      line.push_back(p);
      if (!better(p, line[line.size() - 2], cfg.tie_tol)) break;
      k = line.size() - 1;
    }
  }
  k = best_index();
  if (!line[k].feasible) return finish();
  if (better(line[k], best, cfg.tie_tol)) best = line[k];

  // Golden-section refinement inside the neighbouring probes.
  double a = line[k == 0 ? 0 : k - 1].x;
  double b = line[std::min(k + 1, line.size() - 1)].x;
  const double xtol = cfg.rel_tol * std::max(std::abs(line[k].x), cfg.rel_grid.front() * scale);
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  ScalarProbe p1 = probe(x1), p2 = probe(x2);
  record(p1);
  record(p2);
  ScalarProbe incumbent = line[k];
  for (int it = 0; it < cfg.max_refinements && (b - a) > xtol; ++it) {
    if (better(p1, incumbent, 0.0)) incumbent = p1;
    if (better(p2, incumbent, 0.0)) incumbent = p2;
    if (!p1.feasible && !p2.feasible) {
      // Both interior probes infeasible: keep the part holding the incumbent.
      if (incumbent.x < x1) {
        b = x1;
      } else if (incumbent.x > x2) {
        a = x2;
      } else {
        a = x1;
        b = x2;
      }
      x1 = b - kGolden * (b - a);
      x2 = a + kGolden * (b - a);
      p1 = probe(x1);
      p2 = probe(x2);
      record(p1);
      record(p2);
      continue;
    }
    if (better(p1, p2, 0.0)) {
      b = x2;
      x2 = x1;
      p2 = p1;
      x1 = b - kGolden * (b - a);
      p1 = probe(x1);
      record(p1);
    } else {
      a = x1;
      x1 = x2;
      p1 = p2;
      x2 = a + kGolden * (b - a);
      p2 = probe(x2);
      record(p2);
    }
  }
  for (const auto& p : res.trace)
    if (better(p, best, cfg.tie_tol)) best = p;
  return finish();
}

}  // namespace mor
