#include "mor/iha.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mor/parallel.hpp"

namespace mor {

std::string_view to_string(Step2Mode m) {
  switch (m) {
    case Step2Mode::surrogate: return "surrogate";
    case Step2Mode::exact: return "exact";
    case Step2Mode::both: return "both";
  }
  return "surrogate";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

DrObjective DrObjective::surrogate(const Surrogate& fk, double rel_tol) {
  DrObjective o;
  o.kind_ = Kind::surrogate;
  o.rel_tol_ = rel_tol;
  o.fk_ = fk.order > 0 ? fk.realization() : DenseModel{CMat(0, 0), CMat(0, 0), CVec(0), CVec(0), cplx(0.0)};
  return o;
}

DrObjective DrObjective::exact(const LtiSystem& sys, int cap, double rel_tol, const std::optional<FrequencyGrid>& grid) {
  DrObjective o;
  o.rel_tol_ = rel_tol;
  // The reduced order is not known yet; n + r <= cap is approximated by n < cap.
  if (!grid && sys.order() < cap) {
    o.kind_ = Kind::exact_dense;
    o.full_ = to_dense_model(sys, cap);
    return o;
  }
  o.kind_ = Kind::exact_sampled;
  o.method_ = NormMethod::sampled;
  o.sys_ = sys;
  o.grid_ = grid ? *grid : default_sampled_grid();
  const auto& w = o.grid_->points();
  o.grid_values_ = parallel_map(w.size(), [&](std::size_t i) { return eval(sys, cplx(0.0, w[i])); });
  return o;
}

double DrObjective::operator()(const DrFamily& fam, double dr) const {
  switch (kind_) {
    case Kind::surrogate: {
      if (dr == 0.0) return linf_norm(fk_, rel_tol_).value;
      return linf_norm(block_difference(fk_, increment_model(fam, dr)), rel_tol_).value;
    }
    case Kind::exact_dense:
      return linf_norm(block_difference(full_, assemble_statespace(fam, dr).realization()), rel_tol_).value;
    case Kind::exact_sampled: {
      const DenseModel hr = assemble_statespace(fam, dr).realization();
      const FastEvaluator red(hr);
      const auto& w = grid_->points();
      std::vector<double> g(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) g[i] = std::abs(grid_values_[i] - red(cplx(0.0, w[i])));
      return sampled_peak([&](double x) {
        const cplx s(0.0, x);
        return std::abs(eval(sys_, s) - red(s));
      }, *grid_, g).value;
    }
  }
  return kInf;
}

DrOptimization optimize_dr(const DrFamily& fam, const DrObjective& objective, double margin, const ScalarSearchConfig& policy) {
  auto f = [&](double dr) {
    try {
      if (!stability_of(fam, dr, margin).stable) return kInf;
      return objective(fam, dr);
    } catch (const Error&) {
      return kInf;
    }
  };
  const double scale = f(0.0);
  const ScalarSearchResult s = minimize_scalar(f, scale, policy);
  DrOptimization out;
  out.method = objective.method();
  out.rejected = s.rejected;
  for (const auto& p : s.trace) out.trace.push_back({p.x, p.value, p.feasible});
  out.value_at_zero = s.value_at_zero;
  if (!s.any_feasible()) {
    out.no_stable_dr = true;
    out.dr_star = 0.0;
    out.value = s.value_at_zero;
    return out;
  }
  out.dr_star = s.x;
  out.value = s.value;
  return out;
}

std::vector<TransferSample> error_samples(const SampleLog& log, const ReducedModel& core) {
  return parallel_map(log.entries.size(), [&](std::size_t i) {
    const TransferSample& h = log.entries[i];
    const TransferSample r = eval_deriv(core, h.point);
    return TransferSample{h.point, h.value - r.value, h.derivative - r.derivative};
  });
}

namespace {

bool error_vanishes(const LtiSystem& sys, const ReducedModel& core, const std::vector<TransferSample>& f,
                    const SampleLog& log) {
  double fmax = 0.0, hmax = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    fmax = std::max(fmax, std::abs(f[i].value));
    hmax = std::max(hmax, std::abs(log.entries[i].value));
  }
  std::vector<cplx> probes;
  for (const cplx& p : core.points) {
    probes.emplace_back(0.0, std::abs(p));
    probes.emplace_back(3.0 * std::abs(p), 0.0);
  }
  const auto vals = parallel_map(probes.size(), [&](std::size_t i) {
    const cplx h = eval(sys, probes[i]);
    return std::make_pair(std::abs(h - eval(core, probes[i])), std::abs(h));
  });
  for (const auto& [e, h] : vals) {
    fmax = std::max(fmax, e);
    hmax = std::max(hmax, h);
  }
  return fmax <= 1e-11 * std::max(hmax, 1e-300);
}

Surrogate robust_surrogate(const LoewnerPencil& pencil, SurrogateOrder order, std::vector<std::string>& warnings) {
  try {
    return extract_surrogate(pencil, order);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SingularEk) throw;
  }
  // Fall back to the largest order whose E_k factors.
  const Surrogate full = extract_surrogate(pencil, SurrogateOrder::exactly(0));
  int k = order.fixed ? *order.fixed : pencil.size();
  if (!order.fixed) {
    const Vec& sv = full.singular_values;
    k = 0;
    while (k < sv.size() && sv(k) >= order.tol * sv(0)) ++k;
  }
  for (--k; k >= 0; --k) {
    try {
      Surrogate s = extract_surrogate(pencil, SurrogateOrder::exactly(k));
      warnings.push_back("SingularEk: surrogate order reduced to " + std::to_string(k));
      return s;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularEk) throw;
    }
  }
  return full;
}

}  // namespace

IhaResult run_iha(const LtiSystem& sys, const IhaConfig& cfg) {
  const int n = sys.order(), r = cfg.irka.r;
  if (r < 1 || r > n) fail(ErrorKind::InvalidInput, "reduction order must satisfy 1 <= r <= n");
  if (cfg.stability_margin < 0.0) fail(ErrorKind::InvalidInput, "stability margin must be nonnegative");

  IhaResult out;
  out.irka = run_irka(sys, cfg.irka);
  if (!out.irka.converged)
    out.warnings.push_back(std::string("IrkaFailed: IRKA stopped without converging") +
                           (out.irka.rank_loss ? " (rank loss)" : out.irka.stagnated ? " (stagnation)" : "") +
                           (out.irka.fell_back_to_stable ? "; best stable iterate kept" : ""));
  const ReducedModel& core = out.irka.model;
  out.model = core;
  const DrFamily fam(core);

  const std::vector<TransferSample> raw = error_samples(out.irka.log, core);
  if (error_vanishes(sys, core, raw, out.irka.log)) {
    out.degenerate = true;
    out.sample_count = static_cast<int>(merge_near_duplicates(raw, cfg.merge_gap).size());
    return out;
  }
  const std::vector<TransferSample> data = merge_near_duplicates(raw, cfg.merge_gap);
  out.sample_count = static_cast<int>(data.size());

  const bool want_surrogate = cfg.step2_mode != Step2Mode::exact;
  const bool want_exact = cfg.step2_mode != Step2Mode::surrogate;
  if (want_surrogate) {
    if (data.size() < 2) {
      out.warnings.push_back("InsufficientSamples: fewer than two distinct samples, step 2 skipped");
    } else {
      const LoewnerPencil pencil = build_pencil(data, cfg.surrogate_k.tol);
      SurrogateOrder order = cfg.surrogate_k;
      if (!order.fixed && is_state_space_symmetric(sys)) order.cap = std::min(order.cap.value_or(2 * r + 1), 2 * r + 1);
      out.surrogate = robust_surrogate(pencil, order, out.warnings);
      out.surrogate_step = optimize_dr(fam, DrObjective::surrogate(out.surrogate, cfg.hinf_tol), cfg.stability_margin,
                                       cfg.dr_bracket_policy);
    }
  }
  if (want_exact)
    out.exact_step = optimize_dr(fam, DrObjective::exact(sys, cfg.dense_cap, cfg.hinf_tol, cfg.sampled_grid),
                                 cfg.stability_margin, cfg.dr_bracket_policy);

  const DrOptimization& chosen = cfg.step2_mode == Step2Mode::exact ? *out.exact_step : out.surrogate_step;
  if (chosen.no_stable_dr) out.warnings.push_back("NoStableDr: every probed d_r was rejected; d_r = 0 kept");
  out.dr_star = chosen.dr_star;
  out.objective_value = chosen.value;
  out.objective_at_zero = chosen.value_at_zero;
  out.rejected_dr = chosen.rejected;
  out.model = assemble_statespace(fam, out.dr_star);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ContourNode {
  double u;
  cplx f;
};

// Accumulated arg change of f(map(u)) from a to b with adaptive bisection.
bool accumulate(const std::function<cplx(cplx)>& f, const std::function<cplx(double)>& map, const ContourNode& a,
                const ContourNode& b, int depth, double& phase) {
  const double step = std::arg(b.f / a.f);
  if (std::abs(step) <= std::numbers::pi / 8.0 || depth >= 40) {
    if (std::abs(step) > std::numbers::pi / 2.0) return false;
    phase += step;
    return true;
  }
  const double um = 0.5 * (a.u + b.u);
  const ContourNode m{um, f(map(um))};
  if (!std::isfinite(m.f.real()) || !std::isfinite(m.f.imag()) || std::abs(m.f) == 0.0) return false;
  return accumulate(f, map, a, m, depth + 1, phase) && accumulate(f, map, m, b, depth + 1, phase);
}

bool trace_path(const std::function<cplx(cplx)>& f, const std::function<cplx(double)>& map, const std::vector<double>& us,
                double& phase) {
  std::vector<ContourNode> nodes;
  nodes.reserve(us.size());
  for (double u : us) {
    const cplx v = f(map(u));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) == 0.0) return false;
    nodes.push_back({u, v});
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    if (!accumulate(f, map, nodes[i], nodes[i + 1], 0, phase)) return false;
  return true;
}

}  // namespace

std::optional<int> rhp_winding_count(const std::function<cplx(cplx)>& f, double R) {
  if (!(R > 0.0)) return std::nullopt;
  // Down the imaginary axis from +jR to -jR.
  std::vector<double> ts;
  const int per_side = 600;
  for (int i = 0; i < per_side; ++i) ts.push_back(R * std::pow(10.0, -12.0 * i / (per_side - 1)));
  ts.push_back(0.0);
  for (int i = per_side - 1; i >= 0; --i) ts.push_back(-R * std::pow(10.0, -12.0 * i / (per_side - 1)));
  // Back along the arc from -jR through R to +jR.
  std::vector<double> th;
  const int arc = 512;
  for (int i = 0; i <= arc; ++i) th.push_back(-std::numbers::pi / 2.0 + std::numbers::pi * i / arc);

  double phase = 0.0;
  if (!trace_path(f, [](double t) { return cplx(0.0, t); }, ts, phase)) return std::nullopt;
  if (!trace_path(f, [R](double t) { return std::polar(R, t); }, th, phase)) return std::nullopt;
  const double turns = phase / (2.0 * std::numbers::pi);
  if (std::abs(turns - std::round(turns)) > 1e-3) return std::nullopt;
  return static_cast<int>(std::lround(turns));
}

TrefethenDiagnostics trefethen_diagnostics(const LtiSystem& sys, const ReducedModel& model, const FrequencyGrid& grid, int cap) {
  TrefethenDiagnostics t;
  const bool dense = sys.order() + model.order() <= cap;
  const DenseModel red = model.realization();
  const FastEvaluator hr(red);
  std::optional<DenseModel> full;
  std::optional<FastEvaluator> hf;
  if (dense) {
    full = to_dense_model(sys, cap);
    hf.emplace(*full);
  }
  const std::function<cplx(cplx)> err = [&](cplx s) { return (hf ? (*hf)(s) : eval(sys, s)) - hr(s); };

  const auto& w = grid.points();
  const auto e = parallel_map(w.size(), [&](std::size_t i) { return std::abs(err(cplx(0.0, w[i]))); });
  const double emax = *std::max_element(e.begin(), e.end());
  const double emin = *std::min_element(e.begin(), e.end());
  t.sampled_min = emin;
  if (!(emax > 0.0)) {
    t.degenerate = true;
    t.circularity = 1.0;
  } else {
    t.circularity = emin / emax;
  }

  if (dense) {
    t.certified_max = linf_norm(block_difference(*full, red)).value;
    t.max_method = NormMethod::level_set;
  } else {
    t.certified_max = sampled_peak([&](double x) { return std::abs(err(cplx(0.0, x))); }, grid, e).value;
    t.max_method = NormMethod::sampled;
  }
  if (t.degenerate || !dense) return t;

  double R0 = 1.0;
  for (const cplx& p : model.points) R0 = std::max(R0, std::abs(p));
  for (const cplx& p : poles(red)) R0 = std::max(R0, std::abs(p));
  R0 *= 10.0;
  std::optional<int> prev;
  for (int k = 0; k < 6; ++k) {
    const double R = R0 * std::pow(10.0, k);
    const std::optional<int> c = rhp_winding_count(err, R);
    if (c && prev && *c == *prev) {
      t.rhp_interp_count = *c;
      t.contour_converged = true;
      t.contour_radius = R;
      break;
    }
    prev = c;
    if (c) t.rhp_interp_count = *c;
  }
  return t;
}

}  // namespace mor
