#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "mor/error.hpp"
#include "mor/iha.hpp"
#include "mor/norms.hpp"

namespace mor {
namespace {

double error_norm(const LtiSystem& h, const ReducedModel& m) { return hinf_norm(block_difference(h, m.to_system())).value; }

ReducedModel scalar_core() {
  ReducedModel m;
  m.Er = CMat::Ones(1, 1);
  m.Ar = -CMat::Ones(1, 1);
  m.br = CVec::Ones(1);
  m.cr = CVec::Ones(1);
  m.u_ones = m.w_ones = CVec::Ones(1);
  m.points = {1.0};
  return m;
}

LtiSystem diag_sss(std::vector<double> poles) {
  const int n = static_cast<int>(poles.size());
  Mat A = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = poles[static_cast<std::size_t>(i)];
  return LtiSystem::standard(A, Vec::Ones(n), Vec::Ones(n));
}

TEST(Iha, ExactRecoveryIsDegenerate) {
  const LtiSystem h = test::random_stable(2, 14);
  IhaConfig cfg;
  cfg.irka.r = 2;
  const IhaResult res = run_iha(h, cfg);
  EXPECT_TRUE(res.degenerate);
  EXPECT_EQ(res.dr_star, 0.0);
  EXPECT_LE(error_norm(h, res.model), 1e-8 * hinf_norm(h).value);
}

TEST(Iha, SssImprovesAndExactCheckConfirms) {
  const LtiSystem h = make_synthetic({SyntheticKind::sss, 50, 1});
  IhaConfig cfg;
  cfg.irka.r = 4;
  const IhaResult res = run_iha(h, cfg);
  EXPECT_FALSE(res.degenerate);
  EXPECT_LE(res.objective_value, res.objective_at_zero);
  EXPECT_LE(res.surrogate.order, res.sample_count);
  EXPECT_EQ(res.surrogate.order, 2 * 4 + 1);

  const double e0 = error_norm(h, res.irka.model), e1 = error_norm(h, res.model);
  const FrequencyGrid grid = FrequencyGrid::logspace(1e-4, 1e4, 400);
  const double dev = surrogate_error_report(res.surrogate, h, res.irka.model, grid).max_deviation;
  EXPECT_LE(e1, e0 + 2.0 * dev);
  EXPECT_TRUE(is_stable(res.model.to_system()));

  // Interpolation preserved at the IRKA points.
  for (const cplx s : res.irka.basis.points) {
    const TransferSample a = eval_deriv(h, s), b = eval_deriv(res.model, s);
    EXPECT_LE(std::abs(a.value - b.value), 1e-7 * std::abs(a.value));
    EXPECT_LE(std::abs(a.derivative - b.derivative), 1e-7 * std::abs(a.derivative));
  }

  const auto [lo, hi] = spectrum_magnitude_bounds(h);
  const TrefethenDiagnostics t0 = trefethen_diagnostics(h, res.irka.model, FrequencyGrid::logspace(lo * 1e-2, hi * 1e2, 400));
  const TrefethenDiagnostics t1 = trefethen_diagnostics(h, res.model, FrequencyGrid::logspace(lo * 1e-2, hi * 1e2, 400));
  EXPECT_GT(t1.circularity, t0.circularity);
  ASSERT_TRUE(t1.contour_converged);
  EXPECT_EQ(t1.rhp_interp_count, 2 * 4 + 1);
  EXPECT_LE(t1.sampled_min, t1.certified_max);
}

TEST(Iha, ExactAndSurrogateModesAgree) {
  const LtiSystem h = make_synthetic({SyntheticKind::sss, 60, 2});
  IhaConfig cfg;
  cfg.irka.r = 3;
  cfg.step2_mode = Step2Mode::both;
  const IhaResult res = run_iha(h, cfg);
  ASSERT_TRUE(res.exact_step.has_value());
  const DrFamily fam(res.irka.model);
  const double es = error_norm(h, assemble_statespace(fam, res.surrogate_step.dr_star));
  const double ee = error_norm(h, assemble_statespace(fam, res.exact_step->dr_star));
  EXPECT_LE(std::abs(es - ee), 0.05 * ee);
  EXPECT_LE(res.exact_step->value, res.exact_step->value_at_zero);
}

TEST(Iha, ZeroErrorObjectiveGivesZeroShift) {
  const LtiSystem h = test::first_order(1.0);
  const DrFamily fam(scalar_core());
  const DrOptimization opt = optimize_dr(fam, DrObjective::exact(h), 0.0);
  EXPECT_EQ(opt.dr_star, 0.0);
  EXPECT_NEAR(opt.value, 0.0, 1e-14);
}

TEST(Iha, OneSignedErrorGetsCentered) {
  const LtiSystem h = diag_sss({-1.0, -3.0});
  IhaConfig cfg;
  cfg.irka.r = 1;
  cfg.step2_mode = Step2Mode::exact;
  const IhaResult res = run_iha(h, cfg);
  EXPECT_LT(res.objective_value, res.objective_at_zero);
  EXPECT_NE(res.dr_star, 0.0);

  // Dense sweeps of both error curves agree with the reported norms.
  auto sweep = [&](const ReducedModel& m) {
    return test::sweep_peak([&](double w) { return std::abs(eval(h, cplx(0.0, w)) - eval(m, cplx(0.0, w))); }, 1e-4, 1e4, 200'000);
  };
  const double s0 = sweep(res.irka.model), s1 = sweep(res.model);
  EXPECT_LT(s1, s0);
  EXPECT_NEAR(s0, res.objective_at_zero, 1e-4 * s0);
  EXPECT_NEAR(s1, res.objective_value, 1e-4 * s0);
}

TEST(Iha, DestabilizingProbesLoggedAsInfinite) {
  // Core 1/(s+1); the member pole is dr - 1, so dr >= 1 destabilizes.
  const LtiSystem h = diag_sss({-1.0, -0.5});
  const DrFamily fam(scalar_core());
  const DrOptimization opt = optimize_dr(fam, DrObjective::exact(h), 0.0);
  int unstable = 0;
  for (const DrProbe& p : opt.trace) {
    if (p.dr >= 1.0) {
      EXPECT_FALSE(p.stable);
      EXPECT_EQ(p.value, std::numeric_limits<double>::infinity());
      ++unstable;
    }
  }
  EXPECT_GT(unstable, 0);
  EXPECT_EQ(opt.rejected, unstable);
  EXPECT_LT(opt.dr_star, 1.0);
  EXPECT_LE(opt.value, opt.value_at_zero);
}

TEST(Iha, StabilityMarginRespected) {
  const LtiSystem h = diag_sss({-1.0, -0.5});
  const DrFamily fam(scalar_core());
  const DrOptimization opt = optimize_dr(fam, DrObjective::exact(h), 0.6);
  EXPECT_LE(opt.dr_star, 0.4 + 1e-12);
  EXPECT_TRUE(stability_of(fam, opt.dr_star, 0.6).stable);
}

TEST(Iha, NoRegressionOnRandomSystems) {
  for (int t = 0; t < 8; ++t) {
    const LtiSystem h = test::random_stable(20 + 5 * t, 1300 + t);
    IhaConfig cfg;
    cfg.irka.r = 2 + t % 3;
    const IhaResult res = run_iha(h, cfg);
    EXPECT_LE(res.objective_value, res.objective_at_zero) << "case " << t;
    EXPECT_EQ(res.surrogate_step.trace.front().dr, 0.0);
    EXPECT_TRUE(stability_of(DrFamily(res.irka.model), res.dr_star, 0.0).stable);
  }
}

TEST(Iha, ErrorSamplesAreDifferences) {
  const LtiSystem h = test::random_stable(15, 3);
  IrkaConfig cfg;
  cfg.r = 3;
  const IrkaResult irka = run_irka(h, cfg);
  const auto f = error_samples(irka.log, irka.model);
  ASSERT_EQ(f.size(), irka.log.entries.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const TransferSample r = eval_deriv(irka.model, f[i].point);
    EXPECT_LE(std::abs(f[i].value - (irka.log.entries[i].value - r.value)), 1e-13 * (1.0 + std::abs(r.value)));
  }
}

TEST(Iha, InvalidOrder) {
  IhaConfig cfg;
  cfg.irka.r = 5;
  EXPECT_THROW(run_iha(test::random_stable(3, 1), cfg), Error);
}

TEST(Diagnostics, AllPassErrorIsCircular) {
  // H = 3/(s+1), H_r = 1/(s+1) + 1: H - H_r = (1 - s)/(s + 1).
  const LtiSystem h = test::first_order(1.0, 3.0);
  ReducedModel m = scalar_core();
  m.dr = 1.0;
  const TrefethenDiagnostics t = trefethen_diagnostics(h, m, FrequencyGrid::logspace(1e-3, 1e3, 300));
  EXPECT_NEAR(t.circularity, 1.0, 1e-12);
  EXPECT_FALSE(t.degenerate);
  ASSERT_TRUE(t.contour_converged);
  EXPECT_EQ(t.rhp_interp_count, 1);
  EXPECT_NEAR(t.certified_max, 1.0, 1e-8);
}

TEST(Diagnostics, ExactModelIsDegenerate) {
  const LtiSystem h = test::first_order(1.0);
  const TrefethenDiagnostics t = trefethen_diagnostics(h, scalar_core(), FrequencyGrid::logspace(1e-3, 1e3, 100));
  EXPECT_TRUE(t.degenerate);
  EXPECT_EQ(t.circularity, 1.0);
}

TEST(Diagnostics, WindingCount) {
  auto f = [](cplx s) { return (s - 1.0) * (s - cplx(2.0, 1.0)) * (s - cplx(2.0, -1.0)) / ((s + 1.0) * (s + 4.0)); };
  EXPECT_EQ(rhp_winding_count(f, 100.0), 3);
  auto g = [](cplx s) { return (s - 1.0) / ((s - 3.0) * (s + 2.0)); };
  EXPECT_EQ(rhp_winding_count(g, 100.0), 0);
  auto k = [](cplx s) { return 1.0 / (s + 2.0); };
  EXPECT_EQ(rhp_winding_count(k, 50.0), 0);
}

}  // namespace
}  // namespace mor
