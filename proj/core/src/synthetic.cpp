#include "mor/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace mor {

std::string_view to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::sss: return "sss";
    case SyntheticKind::generic: return "generic";
    case SyntheticKind::resonant_chain: return "resonant-chain";
  }
  return "sss";
}

std::optional<SyntheticKind> parse_synthetic_kind(std::string_view s) {
  if (s == "sss") return SyntheticKind::sss;
  if (s == "generic") return SyntheticKind::generic;
  if (s == "resonant-chain" || s == "resonant_chain") return SyntheticKind::resonant_chain;
  return std::nullopt;
}

namespace {

// Engine output mapped to [0, 1) by hand so files are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

LtiSystem make_sss(int n, Rng& rng) {
  std::vector<Eigen::Triplet<double>> e, a;
  std::vector<double> k(static_cast<std::size_t>(n));
  for (auto& v : k) v = std::pow(10.0, rng.uniform(-1.0, 3.0));
  std::sort(k.begin(), k.end());
  for (int i = 0; i < n; ++i) {
    e.emplace_back(i, i, 2.0 + rng.uniform());
    a.emplace_back(i, i, -k[static_cast<std::size_t>(i)]);
  }
  // Off-diagonals bounded so both matrices stay strictly diagonally dominant.
  for (int i = 0; i + 1 < n; ++i) {
    const double eo = rng.uniform(-0.9, 0.9);
    const double ao = 0.45 * std::min(k[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(i + 1)]) * rng.uniform();
    e.emplace_back(i, i + 1, eo);
    e.emplace_back(i + 1, i, eo);
    a.emplace_back(i, i + 1, ao);
    a.emplace_back(i + 1, i, ao);
  }
  SpMat E(n, n), A(n, n);
  E.setFromTriplets(e.begin(), e.end());
  A.setFromTriplets(a.begin(), a.end());
  Vec b(n);
  for (int i = 0; i < n; ++i) b(i) = rng.normal();
  return LtiSystem::sparse(std::move(E), std::move(A), b, b);
}

LtiSystem make_generic(int n, Rng& rng) {
  Mat G(n, n), K(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = rng.normal();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) K(i, j) = rng.normal();
  Mat A = 0.5 * (G - G.transpose()) - (K * K.transpose() / n + 0.1 * Mat::Identity(n, n));
  Vec b(n), c(n);
  for (int i = 0; i < n; ++i) b(i) = rng.normal();
  for (int i = 0; i < n; ++i) c(i) = rng.normal();
  return LtiSystem::standard(std::move(A), b, c);
}

LtiSystem make_chain(int n, Rng& rng) {
  const int m = n / 2;  // masses; a trailing first-order state when n is odd
  std::vector<double> spring(static_cast<std::size_t>(m + 1));
  for (auto& s : spring) s = std::pow(10.0, rng.uniform(-0.5, 0.5));
  const double alpha = 0.01 + 0.02 * rng.uniform(), beta = 0.005 + 0.01 * rng.uniform();
  std::vector<Eigen::Triplet<double>> a;
  // State [x; v]: x' = v, v' = -K x - (alpha I + beta K) v.
  auto kij = [&](int i, int j) {
    if (i == j) return spring[static_cast<std::size_t>(i)] + spring[static_cast<std::size_t>(i + 1)];
    if (std::abs(i - j) == 1) return -spring[static_cast<std::size_t>(std::max(i, j))];
    return 0.0;
  };
  for (int i = 0; i < m; ++i) {
    a.emplace_back(i, m + i, 1.0);
    for (int j = std::max(0, i - 1); j <= std::min(m - 1, i + 1); ++j) {
      const double k = kij(i, j);
      a.emplace_back(m + i, j, -k);
      a.emplace_back(m + i, m + j, -(beta * k + (i == j ? alpha : 0.0)));
    }
  }
  if (n % 2) a.emplace_back(n - 1, n - 1, -rng.uniform(0.5, 2.0));
  SpMat A(n, n), E(n, n);
  A.setFromTriplets(a.begin(), a.end());
  E.setIdentity();
  Vec b = Vec::Zero(n), c = Vec::Zero(n);
  b(m) = 1.0;           // force on the first mass
  c(0) = 1.0;           // its position (collocated)
  if (n % 2) {
    b(n - 1) = 1.0;
    c(n - 1) = rng.uniform(0.1, 1.0);
  }
  return LtiSystem::sparse(std::move(E), std::move(A), b, c);
}

}  // namespace

LtiSystem make_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 2) fail(ErrorKind::InvalidInput, "synthetic systems need n >= 2");
  Rng rng(spec.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(spec.kind) * 1315423911ull + static_cast<std::uint64_t>(spec.n));
  switch (spec.kind) {
    case SyntheticKind::sss: return make_sss(spec.n, rng);
    case SyntheticKind::generic: return make_generic(spec.n, rng);
    case SyntheticKind::resonant_chain: return make_chain(spec.n, rng);
  }
  return make_sss(spec.n, rng);
}

}  // namespace mor
