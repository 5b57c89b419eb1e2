#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "mor/error.hpp"
#include "mor/lyapunov.hpp"
#include "mor/norms.hpp"

namespace mor {
namespace {

using test::first_order;
using test::resonator;

double resonator_gain(double w) { return 1.0 / std::abs(cplx(1.0 - w * w, 0.2 * w)); }

TEST(Lyapunov, RealResidual) {
  for (int t = 0; t < 5; ++t) {
    const LtiSystem h = test::random_stable(10 + 5 * t, 40 + t);
    const Mat A = h.A_dense();
    const Mat Q = h.b() * h.b().transpose();
    const Mat X = solve_lyapunov(A, Q);
    EXPECT_LE((A * X + X * A.transpose() + Q).norm(), 1e-10 * Q.norm() * (1.0 + X.norm()));
    EXPECT_LE((X - X.transpose()).norm(), 1e-14 * X.norm());
  }
}

TEST(Lyapunov, ComplexResidual) {
  const LtiSystem h = test::random_stable(12, 2);
  CMat A = h.A_dense().cast<cplx>();
  A.diagonal().array() += cplx(0.0, 0.5);
  const CVec b = h.b().cast<cplx>() + cplx(0.0, 1.0) * h.c().cast<cplx>();
  const CMat Q = b * b.adjoint();
  const CMat X = solve_lyapunov(A, Q);
  EXPECT_LE((A * X + X * A.adjoint() + Q).norm(), 1e-10 * Q.norm() * (1.0 + X.norm()));
}

TEST(Lyapunov, PsdFactor) {
  const LtiSystem h = test::random_stable(8, 5);
  const Gramians g = gramians(h);
  const Mat F = psd_factor(g.P);
  EXPECT_LE((F * F.transpose() - g.P).norm(), 1e-10 * g.P.norm());
}

TEST(Lyapunov, FactorMatchesGramian) {
  for (int t = 0; t < 4; ++t) {
    const LtiSystem h = test::random_stable(6 + 7 * t, 60 + t);
    const Mat A = h.A_dense();
    const Mat P = solve_lyapunov(A, Mat(h.b() * h.b().transpose()));
    const Mat F = lyapunov_factor(A, h.b());
    EXPECT_LE((F * F.transpose() - P).norm(), 1e-10 * P.norm());
  }
}

TEST(Lyapunov, FactorRejectsUnstable) {
  Mat A = -Mat::Identity(3, 3);
  A(2, 2) = 0.5;
  EXPECT_THROW(lyapunov_factor(A, Vec::Ones(3)), Error);
}

TEST(Hinf, FirstOrder) {
  const HinfResult r = hinf_norm(first_order(1.0));
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  EXPECT_NEAR(r.peak_frequency, 0.0, 1e-6);
  EXPECT_EQ(r.method, NormMethod::level_set);
}

TEST(Hinf, Resonator) {
  const HinfResult r = hinf_norm(resonator());
  // Closed form for 1/(s^2 + 2 z s + 1): peak 1 / (2 z sqrt(1 - z^2)) at sqrt(1 - 2 z^2).
  const double z = 0.1;
  EXPECT_NEAR(r.value, 1.0 / (2 * z * std::sqrt(1 - z * z)), 1e-8);
  EXPECT_NEAR(r.peak_frequency, std::sqrt(1 - 2 * z * z), 1e-4);
  EXPECT_NEAR(r.value, 5.0252, 1e-4);
  EXPECT_NEAR(r.peak_frequency, 0.98995, 1e-4);
  const double sweep = test::sweep_peak(resonator_gain, 1e-3, 1e3, 10'000'000);
  EXPECT_LE(std::abs(r.value - sweep), 1e-6 * sweep);
}

TEST(Hinf, StaticGain) { EXPECT_NEAR(hinf_norm(LtiSystem::static_gain(0.7)).value, 0.7, 1e-15); }

TEST(Hinf, FeedthroughDominated) {
  // 0.5/(s+1) - 1 has gain 1.0 at infinity and 0.5 at zero.
  EXPECT_NEAR(hinf_norm(first_order(1.0, 0.5, -1.0)).value, 1.0, 1e-9);
}

TEST(Hinf, UnstableRejected) {
  try {
    hinf_norm(first_order(-1.0));
    FAIL() << "expected UnstableSystem";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnstableSystem);
  }
  // The L-infinity norm has no stability requirement.
  EXPECT_NEAR(linf_norm(to_dense_model(first_order(-1.0))).value, 1.0, 1e-9);
}

TEST(Hinf, DimensionCap) { EXPECT_THROW(hinf_norm(test::random_stable(20, 1), 1e-9, 10), Error); }

TEST(Hinf, MatchesDenseSweep) {
  for (int t = 0; t < 10; ++t) {
    const LtiSystem h = test::random_stable(5 + 4 * t, 1000 + t);
    const FastEvaluator f(to_dense_model(h));
    const double sweep = test::sweep_peak([&](double w) { return std::abs(f(cplx(0.0, w))); }, 1e-4, 1e4, 100'000);
    const double v = hinf_norm(h).value;
    EXPECT_GE(v, sweep * (1 - 1e-9)) << "case " << t;
    EXPECT_LE(std::abs(v - sweep), 1e-3 * sweep) << "case " << t;
  }
}

TEST(Hinf, DescriptorSystem) {
  const LtiSystem h = make_synthetic({SyntheticKind::sss, 30, 2});
  const LtiSystem dense = LtiSystem::dense(h.E_dense(), h.A_dense(), h.b(), h.c());
  const FastEvaluator f(to_dense_model(dense));
  const double sweep = test::sweep_peak([&](double w) { return std::abs(f(cplx(0.0, w))); }, 1e-5, 1e5, 100'000);
  EXPECT_LE(std::abs(hinf_norm(h).value - sweep), 1e-3 * sweep);
}

TEST(Sampled, FirstOrderDefaultGrid) {
  const HinfResult r = hinf_norm_sampled(first_order(1.0));
  EXPECT_NEAR(r.value, 1.0, 1e-8);
  EXPECT_EQ(r.method, NormMethod::sampled);
}

TEST(Sampled, ResonatorWithRefinement) {
  const HinfResult r = hinf_norm_sampled(resonator(), FrequencyGrid::logspace(1e-2, 1e2, 500));
  const double exact = hinf_norm(resonator()).value;
  EXPECT_LE(std::abs(r.value - exact), 1e-3 * exact);
  EXPECT_LE(r.value, exact * (1 + 1e-12));
}

TEST(Sampled, GridMissingPeakUnderestimates) {
  const HinfResult r = hinf_norm_sampled(resonator(), FrequencyGrid::logspace(10.0, 100.0, 500));
  EXPECT_LT(r.value, hinf_norm(resonator()).value);
}

TEST(Sampled, PeakWithPrecomputedGains) {
  const FrequencyGrid g = FrequencyGrid::linspace(0.5, 1.5, 11);
  std::vector<double> gains;
  for (double w : g.points()) gains.push_back(resonator_gain(w));
  const HinfResult r = sampled_peak(resonator_gain, g, gains);
  EXPECT_NEAR(r.value, 5.0252, 1e-3);
  EXPECT_THROW(sampled_peak(resonator_gain, g, std::vector<double>(3, 0.0)), Error);
}

TEST(H2, ClosedForms) {
  EXPECT_NEAR(h2_norm(first_order(1.0)), std::sqrt(0.5), 1e-12);
  for (double a : {0.5, 1.0, 4.0}) EXPECT_NEAR(h2_norm(first_order(a)), 1.0 / std::sqrt(2 * a), 1e-10);
  EXPECT_NEAR(h2_norm(first_order(4.0)), 0.35355, 1e-5);
}

TEST(H2, Errors) {
  try {
    h2_norm(first_order(1.0, 1.0, 0.3));
    FAIL() << "expected NonProper";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonProper);
  }
  try {
    h2_norm(first_order(-1.0));
    FAIL() << "expected UnstableSystem";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnstableSystem);
  }
}

TEST(H2, MatchesQuadrature) {
  for (int t = 0; t < 4; ++t) {
    const LtiSystem h = test::random_stable(5 + 5 * t, 60 + t);
    const FastEvaluator f(to_dense_model(h));
    // (1/pi) int_0^inf |H(jw)|^2 dw with w = tan(theta), composite Simpson.
    const int m = 400'000;
    const double hstep = (std::numbers::pi / 2) / m;
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double th = std::min(i * hstep, std::numbers::pi / 2 - 1e-12);
      const double w = std::tan(th), c = std::cos(th);
      const double v = std::norm(f(cplx(0.0, w))) / (c * c);
      acc += (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0)) * v;
    }
    const double quad = std::sqrt(acc * hstep / 3.0 / std::numbers::pi);
    EXPECT_LE(std::abs(h2_norm(h) - quad), 1e-4 * quad) << "case " << t;
  }
}

TEST(Hankel, FirstOrder) {
  const HankelSpectrum s = hankel_singular_values(first_order(1.0));
  ASSERT_EQ(s.sigmas.size(), 1u);
  EXPECT_NEAR(s.sigma(1), 0.5, 1e-12);
  EXPECT_EQ(s.sigma(2), 0.0);
}

TEST(Hankel, DecoupledZeroMode) {
  Mat A = Mat::Zero(2, 2);
  A.diagonal() << -1.0, -2.0;
  Vec b = Vec::Ones(2), c(2);
  c << 1.0, 0.0;
  const HankelSpectrum s = hankel_singular_values(LtiSystem::standard(A, b, c));
  EXPECT_NEAR(s.sigma(1), 0.5, 1e-12);
  EXPECT_NEAR(s.sigma(2), 0.0, 1e-12);
}

TEST(Hankel, SimilarityInvariant) {
  const LtiSystem h = test::random_stable(10, 33);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  Mat T(10, 10);
  for (int j = 0; j < 10; ++j)
    for (int i = 0; i < 10; ++i) T(i, j) = nd(rng);
  T += 5.0 * Mat::Identity(10, 10);
  const Mat Ti = T.inverse();
  const LtiSystem g = LtiSystem::standard(Ti * h.A_dense() * T, Ti * h.b(), T.transpose() * h.c());
  const auto a = hankel_singular_values(h).sigmas, b = hankel_singular_values(g).sigmas;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(std::abs(a[i] - b[i]), 1e-8 * a[0]);
}

TEST(Hankel, DescriptorMatchesStandardForm) {
  const LtiSystem h = make_synthetic({SyntheticKind::sss, 12, 5});
  const StandardForm sf = standard_form(h);
  const auto a = hankel_singular_values(h).sigmas;
  const auto b = hankel_singular_values(LtiSystem::standard(sf.A, sf.b, sf.c)).sigmas;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(std::abs(a[i] - b[i]), 1e-9 * a[0]);
}

TEST(ErrorBound, IdenticalModel) {
  const LtiSystem h = test::random_stable(6, 3);
  const ErrorAndBound eb = relative_error_and_bound(h, h, 6);
  EXPECT_LE(eb.rel_error, 1e-10);
  EXPECT_EQ(eb.lower_bound, 0.0);
}

TEST(ErrorBound, ZeroModel) {
  const LtiSystem h = test::random_stable(6, 3);
  const ErrorAndBound eb = relative_error_and_bound(h, LtiSystem::static_gain(0.0), 0);
  EXPECT_NEAR(eb.rel_error, 1.0, 1e-9);
  EXPECT_GT(eb.lower_bound, 0.0);
  EXPECT_LE(eb.lower_bound, 1.0 + 1e-12);
  EXPECT_TRUE(eb.bound_respected);
}

TEST(ErrorBound, SampledFallbackIsFlagged) {
  const LtiSystem h = test::random_stable(6, 3);
  ErrorBoundOptions opt;
  opt.force_sampled = true;
  const ErrorAndBound eb = relative_error_and_bound(h, LtiSystem::static_gain(0.0), 0, opt);
  EXPECT_EQ(eb.method, NormMethod::sampled);
  EXPECT_EQ(eb.lower_bound, 0.0);
}

TEST(ErrorBound, SandwichLowerEnd) {
  const LtiSystem h = test::random_stable(15, 8);
  const LtiSystem red = test::random_stable(3, 9);
  const LtiSystem diff = block_difference(h, red);
  const FastEvaluator f(to_dense_model(diff));
  double mn = 1e300;
  for (double w : FrequencyGrid::logspace(1e-3, 1e3, 2000).points()) mn = std::min(mn, std::abs(f(cplx(0.0, w))));
  EXPECT_LE(mn, hinf_norm(diff).value);
}

}  // namespace
}  // namespace mor
