#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mor/statespace.hpp"
#include "mor/synthetic.hpp"

namespace mor::test {

/// c / (s + a) + d
inline LtiSystem first_order(double a, double c = 1.0, double d = 0.0) {
  return LtiSystem::standard(Mat::Constant(1, 1, -a), Vec::Ones(1), Vec::Constant(1, c), d);
}

/// 1 / (s^2 + 2 zeta s + 1) in companion form.
inline LtiSystem resonator(double two_zeta = 0.2) {
  Mat A(2, 2);
  A << 0.0, 1.0, -1.0, -two_zeta;
  Vec b(2), c(2);
  b << 0.0, 1.0;
  c << 1.0, 0.0;
  return LtiSystem::standard(A, b, c);
}

/// Dense stable system with mixed real and complex poles.
inline LtiSystem random_stable(int n, std::uint64_t seed) {
  return make_synthetic({SyntheticKind::generic, n, seed});
}

inline double rel_diff(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Conjugate-closed points in the open right half-plane: pairs first, a
/// trailing real point when r is odd.
inline std::vector<cplx> random_rhp_points(int r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(0.05, 3.0), im(0.1, 3.0);
  std::vector<cplx> p;
  for (int i = 0; i + 1 < r; i += 2) {
    const cplx s(re(rng), im(rng));
    p.push_back(s);
    p.push_back(std::conj(s));
  }
  if (r % 2) p.emplace_back(re(rng), 0.0);
  return p;
}

/// Lightly damped rational of order m in modal form (damping 0.02..0.2,
/// frequencies over two decades, one real pole when m is odd). `pts` gets
/// m conjugate-closed Hermite points next to the mirrored poles.
inline LtiSystem random_damped_rational(int m, std::mt19937_64& rng, std::vector<cplx>& pts) {
  std::uniform_real_distribution<double> lg(-1.0, 1.0), zeta(0.02, 0.2), jit(0.7, 1.4);
  std::normal_distribution<double> nd;
  Mat A = Mat::Zero(m, m);
  Vec b(m), c(m);
  pts.clear();
  for (int i = 0; i + 1 < m; i += 2) {
    const double w = std::pow(10.0, lg(rng)), a = -zeta(rng) * w;
    A(i, i) = A(i + 1, i + 1) = a;
    A(i, i + 1) = w;
    A(i + 1, i) = -w;
    const cplx s(-a * jit(rng), w);
    pts.push_back(s);
    pts.push_back(std::conj(s));
  }
  if (m % 2) {
    A(m - 1, m - 1) = -std::pow(10.0, lg(rng));
    pts.emplace_back(-A(m - 1, m - 1) * jit(rng), 0.0);
  }
  for (int i = 0; i < m; ++i) {
    b(i) = 1.0 + 0.5 * nd(rng);
    c(i) = 1.0 + 0.5 * nd(rng);
  }
  return LtiSystem::standard(A, b, c);
}

/// Brute-force peak gain on a log grid.
template <typename F>
double sweep_peak(const F& gain, double lo, double hi, int count) {
  double best = gain(0.0);
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) best = std::max(best, gain(lo * std::exp(step * i)));
  return best;
}

}  // namespace mor::test
