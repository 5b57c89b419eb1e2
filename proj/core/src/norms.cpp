#include "mor/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mor/lyapunov.hpp"
#include "mor/parallel.hpp"

namespace mor {

std::string_view to_string(NormMethod m) { return m == NormMethod::level_set ? "level-set" : "sampled"; }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

template <typename S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

inline double conj_of(double x) { return x; }
inline cplx conj_of(cplx x) { return std::conj(x); }

// Standard form A x' = ..., with b and c balanced so that ||b|| = ||c||.
template <typename S>
struct Standard {
  MatT<S> A;
  VecT<S> b, c;
  S d;
};

template <typename S>
Standard<S> to_standard(const DenseModel& m) {
  Standard<S> f;
  Eigen::PartialPivLU<CMat> lu(m.E);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) fail(ErrorKind::SingularE, "E is numerically singular");
  CMat A = lu.solve(m.A);
  CVec b = lu.solve(m.b);
  CVec c = m.c;
  const double nb = b.norm(), nc = c.norm();
  if (nb > 0.0 && nc > 0.0) {
    const double a = std::sqrt(nc / nb);
    b *= a;
    c /= a;
  }
  if constexpr (std::is_same_v<S, double>) {
    f.A = A.real();
    f.b = b.real();
    f.c = c.real();
    f.d = m.d.real();
  } else {
    f.A = A;
    f.b = b;
    f.c = c;
    f.d = m.d;
  }
  return f;
}

template <typename S>
std::vector<cplx> eigenvalues_of(const MatT<S>& M) {
  std::vector<cplx> out;
  if (M.rows() == 0) return out;
  if constexpr (std::is_same_v<S, double>) {
    Eigen::EigenSolver<Mat> es(M, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "eigenvalue iteration did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  } else {
    Eigen::ComplexEigenSolver<CMat> es(M, false);
    if (es.info() != Eigen::Success) fail(ErrorKind::SingularPencil, "eigenvalue iteration did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

// Frequencies w where gamma is a singular value of G(jw): imaginary
// eigenvalues of the Hamiltonian of G / gamma at level 1.
template <typename S>
std::vector<double> level_crossings(const Standard<S>& f, double gamma) {
  const Eigen::Index n = f.A.rows();
  const double sg = std::sqrt(gamma);
  const VecT<S> b = f.b / sg;
  const VecT<S> c = f.c / sg;
  const S d = f.d / gamma;
  const double R = 1.0 - std::norm(d);
  const MatT<S> C = c.transpose();                 // 1 x n
  const MatT<S> Cs = c.conjugate();                // n x 1
  const MatT<S> Bs = b.adjoint();                  // 1 x n
  MatT<S> H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = f.A + (conj_of(d) / R) * b * C;
  H.topRightCorner(n, n) = (1.0 / R) * b * Bs;
  H.bottomLeftCorner(n, n) = (-1.0 / R) * Cs * C;
  H.bottomRightCorner(n, n) = -f.A.adjoint() - (d / R) * Cs * Bs;
  const double scale = H.cwiseAbs().rowwise().sum().maxCoeff();
  std::vector<double> w;
  for (const cplx& l : eigenvalues_of<S>(H)) {
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag())) continue;
    if (std::abs(l.real()) <= 1e-8 * scale + 1e-6 * std::abs(l.imag())) w.push_back(l.imag());
  }
  std::sort(w.begin(), w.end());
  return w;
}

struct GainProbe {
  double gain = 0.0;
  double w = 0.0;
};

// Golden-section search for a local maximum of gain on [a, b]. Only ever
// raises `best`; the Hamiltonian test still certifies the final value.
template <typename Gain>
void refine_peak(const Gain& raw_gain, double a, double b, GainProbe& best) {
  const auto gain = [&](double w) {
    try {
      return raw_gain(w);
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = gain(x1), f2 = gain(x2);
  for (int it = 0; it < 40 && std::isfinite(f1) && std::isfinite(f2); ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = gain(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = gain(x2);
    }
  }
  if (std::isfinite(f1) && f1 > best.gain) best = {f1, x1};
  if (std::isfinite(f2) && f2 > best.gain) best = {f2, x2};
}

template <typename S>
HinfResult level_set(const DenseModel& m, double rel_tol, bool require_stable) {
  HinfResult res;
  res.method = NormMethod::level_set;
  if (m.order() == 0) {
    res.value = std::abs(m.d);
    return res;
  }
  const Standard<S> f = to_standard<S>(m);
  const std::vector<cplx> lam = eigenvalues_of<S>(f.A);
  if (require_stable)
    for (const cplx& l : lam)
      if (!(l.real() < 0.0)) fail(ErrorKind::UnstableSystem, "system has a pole with nonnegative real part");

  const FastEvaluator G(m);
  const bool real = std::is_same_v<S, double>;
  auto gain = [&](double w) { return std::abs(G(cplx(0.0, w))); };

  // Initial level: |d|, w = 0, pole frequencies and a coarse log sweep.
  std::vector<double> probes{0.0};
  double lo = kInf, hi = 0.0;
  for (const cplx& l : lam) {
    const double a = std::abs(l);
    if (a > 0.0) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    probes.push_back(l.imag());
    probes.push_back(a);
    if (!real) probes.push_back(-a);
  }
  if (!(hi > 0.0)) lo = hi = 1.0;
  const double wlo = lo / 10.0, whi = hi * 10.0;
  for (int i = 0; i < 64; ++i) {
    const double w = wlo * std::pow(whi / wlo, i / 63.0);
    probes.push_back(w);
    if (!real) probes.push_back(-w);
  }
  GainProbe best{std::abs(m.d), kInf};
  for (double w : probes) {
    const double g = gain(w);
    if (!std::isfinite(g)) {
      res.value = kInf;
      res.peak_frequency = w;
      return res;
    }
    if (g > best.gain) best = {g, w};
  }
  if (!(best.gain > 0.0)) return res;
  std::sort(probes.begin(), probes.end());
  {
    const auto at = std::lower_bound(probes.begin(), probes.end(), best.w);
    if (at != probes.end()) {
      const double a = at == probes.begin() ? *at : *(at - 1);
      const double b = at + 1 == probes.end() ? *at : *(at + 1);
      if (b > a) refine_peak(gain, a, b, best);
    }
  }

  for (int it = 0; it < 200; ++it) {
    res.iterations = it + 1;
    const double gamma = (1.0 + rel_tol) * best.gain;
    const std::vector<double> w = level_crossings(f, gamma);
    if (w.size() < 2) break;
    bool improved = false;
    std::size_t top = 0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      const double mid = 0.5 * (w[i] + w[i + 1]);
      const double g = gain(mid);
      if (g > best.gain) {
        if (g > gamma) improved = true;
        best = {g, mid};
        top = i;
      }
    }
    if (!improved) break;
    refine_peak(gain, w[top], w[top + 1], best);
  }
  res.value = best.gain;
  res.peak_frequency = std::abs(best.w);
  if (!real) res.peak_frequency = best.w;
  return res;
}

bool stable_standard(const LtiSystem& sys, int cap) {
  for (const cplx& p : poles(sys, cap))
    if (!(p.real() < 0.0)) return false;
  return true;
}

}  // namespace

HinfResult linf_norm(const DenseModel& m, double rel_tol) {
  if (is_real(m, 1e-14)) return level_set<double>(m, rel_tol, false);
  return level_set<cplx>(m, rel_tol, false);
}

HinfResult hinf_norm(const DenseModel& m, double rel_tol) {
  if (is_real(m, 1e-14)) return level_set<double>(m, rel_tol, true);
  return level_set<cplx>(m, rel_tol, true);
}

HinfResult hinf_norm(const LtiSystem& sys, double rel_tol, int cap) {
  if (sys.order() > cap) fail(ErrorKind::DimensionTooLarge, "order exceeds the dense cap; use hinf_norm_sampled");
  return hinf_norm(to_dense_model(sys, cap), rel_tol);
}

FrequencyGrid default_sampled_grid() { return FrequencyGrid::logspace(1e-8, 10.0, 500); }

HinfResult sampled_peak(const std::function<double(double)>& gain, const FrequencyGrid& grid, int refine_iters) {
  const auto& w = grid.points();
  return sampled_peak(gain, grid, parallel_map(w.size(), [&](std::size_t i) { return gain(w[i]); }), refine_iters);
}

HinfResult sampled_peak(const std::function<double(double)>& gain, const FrequencyGrid& grid,
                        const std::vector<double>& g, int refine_iters) {
  const auto& w = grid.points();
  if (g.size() != w.size()) fail(ErrorKind::DimensionMismatch, "grid gains do not match the grid");
  std::size_t arg = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (g[i] > g[arg]) arg = i;
  HinfResult res{g[arg], w[arg], NormMethod::sampled, 0};
  if (w.size() < 2 || refine_iters <= 0) return res;

  const double a0 = w[arg == 0 ? 0 : arg - 1];
  const double b0 = w[std::min(arg + 1, w.size() - 1)];
  const bool logs = grid.spacing() == Spacing::logarithmic && a0 > 0.0;
  auto to_w = [&](double x) { return logs ? std::exp(x) : x; };
  double a = logs ? std::log(a0) : a0, b = logs ? std::log(b0) : b0;
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = gain(to_w(x1)), f2 = gain(to_w(x2));
  auto keep = [&](double x, double f) {
    if (f > res.value) {
      res.value = f;
      res.peak_frequency = to_w(x);
    }
  };
  keep(x1, f1);
  keep(x2, f2);
  for (int it = 0; it < refine_iters; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = gain(to_w(x1));
      keep(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = gain(to_w(x2));
      keep(x2, f2);
    }
  }
  res.iterations = refine_iters;
  return res;
}

HinfResult hinf_norm_sampled(const LtiSystem& sys, const FrequencyGrid& grid) {
  return sampled_peak([&](double w) { return std::abs(eval(sys, cplx(0.0, w))); }, grid);
}

double h2_norm(const LtiSystem& sys, int cap) {
  if (sys.d() != 0.0) fail(ErrorKind::NonProper, "H2 norm requires d = 0");
  if (sys.order() == 0) return 0.0;
  if (sys.order() > cap) fail(ErrorKind::DimensionTooLarge, "order exceeds the dense cap");
  if (!stable_standard(sys, cap)) fail(ErrorKind::UnstableSystem, "system has a pole with nonnegative real part");
  const StandardForm f = standard_form(sys, cap);
  const Mat P = solve_lyapunov(f.A, Mat(f.b * f.b.transpose()));
  return std::sqrt(std::max(0.0, f.c.dot(P * f.c)));
}

HankelSpectrum hankel_singular_values(const LtiSystem& sys, int cap) {
  HankelSpectrum h;
  if (sys.order() == 0) return h;
  if (sys.order() > cap) fail(ErrorKind::DimensionTooLarge, "order exceeds the dense cap");
  if (!stable_standard(sys, cap)) fail(ErrorKind::UnstableSystem, "system has a pole with nonnegative real part");
  const StandardForm f = standard_form(sys, cap);
  const Mat Lp = lyapunov_factor(f.A, f.b), Lq = lyapunov_factor(Mat(f.A.transpose()), f.c);
  Eigen::JacobiSVD<Mat> svd(Lq.transpose() * Lp);
  const Vec s = svd.singularValues();
  h.sigmas.assign(s.data(), s.data() + s.size());
  std::sort(h.sigmas.begin(), h.sigmas.end(), std::greater<>());
  return h;
}

ErrorAndBound relative_error_and_bound(const LtiSystem& sys, const LtiSystem& reduced, int r, const ErrorBoundOptions& opt) {
  ErrorAndBound out;
  const bool certified = !opt.force_sampled && sys.order() + reduced.order() <= opt.cap;
  const FrequencyGrid grid = opt.grid ? *opt.grid : default_sampled_grid();
  double full = 0.0;
  HinfResult err;
  std::optional<HankelSpectrum> spectrum = opt.hsv;
  if (certified) {
    full = opt.full_norm ? *opt.full_norm : hinf_norm(sys, 1e-9, opt.cap).value;
    err = hinf_norm(block_difference(sys, reduced), 1e-9, opt.cap);
    if (!spectrum) spectrum = hankel_singular_values(sys, opt.cap);
  } else {
    full = opt.full_norm ? *opt.full_norm : hinf_norm_sampled(sys, grid).value;
    err = sampled_peak([&](double w) {
      const cplx s(0.0, w);
      return std::abs(eval(sys, s) - eval(reduced, s));
    }, grid);
  }
  out.method = certified ? NormMethod::level_set : NormMethod::sampled;
  out.full_norm = full;
  out.abs_error = err.value;
  out.peak_frequency = err.peak_frequency;
  out.rel_error = full > 0.0 ? err.value / full : (err.value == 0.0 ? 0.0 : kInf);
  if (spectrum && full > 0.0) out.lower_bound = spectrum->sigma(r + 1) / full;
  out.bound_respected = out.rel_error >= out.lower_bound - opt.tol;
  return out;
}

}  // namespace mor
