#include "mor/irka.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>

namespace mor {

namespace {

// Largest Ritz value magnitude of op from an Arnoldi run started at ones.
template <typename Op>
double arnoldi_max_magnitude(int n, int steps, Op&& op) {
  const int m = std::min(steps, n);
  Mat Q = Mat::Zero(n, m + 1);
  Mat H = Mat::Zero(m + 1, m);
  Q.col(0) = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
  int k = 0;
  for (; k < m; ++k) {
    Vec w = op(Vec(Q.col(k)));
    for (int pass = 0; pass < 2; ++pass) {  // reorthogonalize once
      for (int j = 0; j <= k; ++j) {
        const double h = Q.col(j).dot(w);
        H(j, k) += h;
        w -= h * Q.col(j);
      }
    }
    const double beta = w.norm();
    H(k + 1, k) = beta;
    if (beta < 1e-12 * H.col(k).norm()) {
      ++k;
      break;
    }
    Q.col(k + 1) = w / beta;
  }
  Eigen::EigenSolver<Mat> es(H.topLeftCorner(k, k), false);
  double best = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, std::abs(es.eigenvalues()[i]));
  return best;
}

bool same_point(cplx a, cplx b) { return a == b; }

}  // namespace

double relative_shift_change(const std::vector<cplx>& next, const std::vector<cplx>& prev) {
  double worst = 0.0;
  for (const cplx& s : next) {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx& p : prev) best = std::min(best, std::abs(s - p) / std::max(std::abs(p), 1e-300));
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<cplx> mirrored_shifts(const std::vector<cplx>& reduced_poles, bool* reflected) {
  std::vector<cplx> out;
  out.reserve(reduced_poles.size());
  bool any = false;
  for (const cplx& l : reduced_poles) {
    if (l.real() >= 0.0) any = true;
    double re = std::abs(l.real());
    if (re == 0.0) re = 1e-12 * std::max(std::abs(l), 1e-300);
    out.emplace_back(re, -l.imag());
  }
  if (reflected) *reflected = any;
  return canonical_shift_order(std::move(out));
}

std::pair<double, double> spectrum_magnitude_bounds(const LtiSystem& sys, int steps) {
  const int n = sys.order();
  if (n == 0) return {1.0, 1.0};
  double hi = 0.0, lo = 0.0;
  if (sys.storage() == Storage::dense) {
    Eigen::PartialPivLU<Mat> luE(sys.dense_E()), luA(sys.dense_A());
    hi = arnoldi_max_magnitude(n, steps, [&](const Vec& v) { return Vec(luE.solve(sys.dense_A() * v)); });
    lo = 1.0 / arnoldi_max_magnitude(n, steps, [&](const Vec& v) { return Vec(luA.solve(sys.dense_E() * v)); });
  } else {
    Eigen::SparseLU<SpMat> luE, luA;
    luE.compute(sys.sparse_E());
    luA.compute(sys.sparse_A());
    if (luA.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "A is singular; system has a pole at 0");
    hi = arnoldi_max_magnitude(n, steps, [&](const Vec& v) { return Vec(luE.solve(sys.sparse_A() * v)); });
    lo = 1.0 / arnoldi_max_magnitude(n, steps, [&](const Vec& v) { return Vec(luA.solve(sys.sparse_E() * v)); });
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo > 0.0) || !(hi > 0.0)) return {1.0, 1.0};
  if (lo > hi) std::swap(lo, hi);
  return {lo, hi};
}

std::vector<cplx> initial_shifts(const LtiSystem& sys, const IrkaConfig& cfg) {
  const int r = cfg.r;
  if (cfg.init == ShiftInit::given_list) {
    if (static_cast<int>(cfg.initial_shifts.size()) != r) fail(ErrorKind::InvalidInput, "initial shift list must have r entries");
    for (const cplx& s : cfg.initial_shifts)
      if (!(s.real() > 0.0)) fail(ErrorKind::InvalidInput, "initial shifts must lie in the open right half-plane");
    return canonical_shift_order(cfg.initial_shifts);
  }
  auto [lo, hi] = spectrum_magnitude_bounds(sys);
  if (hi < lo * 1.01) {
    lo /= 2.0;
    hi *= 2.0;
  }
  std::vector<cplx> out;
  if (cfg.init == ShiftInit::log_spaced_in_spectrum_bounds) {
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < r; ++i) out.emplace_back(r == 1 ? std::sqrt(lo * hi) : std::pow(10.0, a + (b - a) * i / (r - 1)), 0.0);
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(std::log10(lo), std::log10(hi));
    while (static_cast<int>(out.size()) < r) {
      const double s = std::pow(10.0, u(rng));
      const bool dup = std::any_of(out.begin(), out.end(), [&](cplx t) { return std::abs(t.real() - s) < 1e-6 * s; });
      if (!dup) out.emplace_back(s, 0.0);
    }
  }
  return canonical_shift_order(std::move(out));
}

namespace {

// build_basis with one retry after nudging any shift that hits a pole.
InterpolationBasis build_with_retry(const LtiSystem& sys, std::vector<cplx> shifts, ColumnScaling scaling) {
  try {
    return build_basis(sys, shifts, scaling);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularShift) throw;
  }
  for (cplx& s : shifts) {
    if (s.imag() < 0.0) continue;
    try {
      ShiftedSolver probe(sys, s);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularShift) throw;
      s *= 1.0 + 1e-8;
    }
  }
  for (std::size_t i = 0; i < shifts.size(); ++i)
    if (shifts[i].imag() < 0.0)
      for (const cplx& t : shifts)
        if (t.imag() > 0.0 && std::abs(t - std::conj(shifts[i])) < 1e-6 * std::abs(t)) shifts[i] = std::conj(t);
  return build_basis(sys, shifts, scaling);
}

void append_samples(SampleLog& log, const InterpolationBasis& basis) {
  for (const TransferSample& smp : basis.samples) {
    ++log.raw_count;
    const bool dup = std::any_of(log.entries.begin(), log.entries.end(),
                                 [&](const TransferSample& e) { return same_point(e.point, smp.point); });
    if (!dup) log.entries.push_back(smp);
  }
  ++log.iterations_used;
}

}  // namespace

IrkaResult run_irka(const LtiSystem& sys, const IrkaConfig& cfg, const IrkaObserver& observer) {
  const int n = sys.order();
  if (cfg.r < 1 || cfg.r > n) fail(ErrorKind::InvalidInput, "reduction order must satisfy 0 < r <= n");
  if (!(cfg.tol > 0.0)) fail(ErrorKind::InvalidInput, "tolerance must be positive");
  if (cfg.max_iters < 1) fail(ErrorKind::InvalidInput, "max_iters must be positive");

  IrkaResult res;
  std::vector<cplx> shifts = initial_shifts(sys, cfg);
  InterpolationBasis basis = build_with_retry(sys, shifts, cfg.scaling);
  shifts = basis.points;
  append_samples(res.log, basis);
  ReducedModel model = realify(project(sys, basis));

  {
    IrkaTraceRecord rec{0, shifts, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN(), false};
    if (observer) observer(rec);
    res.trace.push_back(std::move(rec));
  }

  double best_residual = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  struct Iterate {
    ReducedModel model;
    InterpolationBasis basis;
    double residual;
  };
  std::optional<Iterate> best_stable;
  auto stable = [](const ReducedModel& m) {
    const auto lam = poles(m);
    return std::all_of(lam.begin(), lam.end(), [](cplx l) { return l.real() < 0.0; });
  };
  for (int it = 1; it <= cfg.max_iters; ++it) {
    bool reflected = false;
    std::vector<cplx> next = mirrored_shifts(poles(model), &reflected);
    res.reflection_triggered = res.reflection_triggered || reflected;
    const double change = relative_shift_change(next, shifts);

    InterpolationBasis next_basis;
    try {
      next_basis = build_with_retry(sys, next, cfg.scaling);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RankDeficient) throw;
      res.rank_loss = true;
      break;
    }
    ReducedModel next_model;
    try {
      next_model = realify(project(sys, next_basis));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularPencil) throw;
      res.rank_loss = true;
      break;
    }

    // H2 first-order residual of the current model at its mirrored poles.
    double residual = 0.0;
    // A mirrored unstable pole is a pole of the current model: no residual there.
    for (const TransferSample& smp : next_basis.samples) {
      TransferSample red;
      try {
        red = eval_deriv(model, smp.point);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularShift) throw;
        residual = std::numeric_limits<double>::infinity();
        continue;
      }
      const double scale = 1.0 + std::abs(smp.value);
      residual = std::max({residual, std::abs(smp.value - red.value) / scale, std::abs(smp.derivative - red.derivative) / scale});
    }

    if (std::isfinite(residual) && (!best_stable || residual < best_stable->residual) && stable(model))
      best_stable = Iterate{model, basis, residual};

    append_samples(res.log, next_basis);
    basis = std::move(next_basis);
    model = std::move(next_model);
    shifts = basis.points;
    res.iterations = it;
    res.final_shift_change = change;

    IrkaTraceRecord rec{it, shifts, change, residual, reflected};
    if (observer) observer(rec);
    res.trace.push_back(std::move(rec));

    if (change < cfg.tol) {
      res.converged = true;
      break;
    }
    if (residual < best_residual * (1.0 - 1e-3)) {
      best_residual = residual;
      since_improvement = 0;
    } else if (++since_improvement >= cfg.stagnation_window) {
      res.stagnated = true;
      break;
    }
  }

  if (!res.converged && best_stable && !stable(model)) {
    model = std::move(best_stable->model);
    basis = std::move(best_stable->basis);
    res.fell_back_to_stable = true;
  }
  res.model = std::move(model);
  res.basis = std::move(basis);
  return res;
}

H2ConditionReport check_h2_conditions(const LtiSystem& sys, const ReducedModel& model, double tol) {
  const std::vector<cplx> lam = poles(model);
  for (std::size_t i = 0; i < lam.size(); ++i)
    for (std::size_t j = i + 1; j < lam.size(); ++j)
      if (std::abs(lam[i] - lam[j]) <= 1e-10) fail(ErrorKind::RepeatedPoles, "reduced model has repeated poles");
  H2ConditionReport rep;
  for (const cplx& l : lam) {
    const cplx s = -l;
    const TransferSample full = eval_deriv(sys, s);
    const TransferSample red = eval_deriv(model, s);
    const double scale = 1.0 + std::abs(full.value);
    rep.points.push_back(s);
    rep.value_residuals.push_back(std::abs(full.value - red.value) / scale);
    rep.derivative_residuals.push_back(std::abs(full.derivative - red.derivative) / scale);
    rep.max_value_residual = std::max(rep.max_value_residual, rep.value_residuals.back());
    rep.max_derivative_residual = std::max(rep.max_derivative_residual, rep.derivative_residuals.back());
  }
  rep.passed = rep.max_value_residual <= tol && rep.max_derivative_residual <= tol;
  return rep;
}

}  // namespace mor
