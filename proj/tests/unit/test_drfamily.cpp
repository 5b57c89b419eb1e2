#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "mor/drfamily.hpp"
#include "mor/error.hpp"
#include "mor/irka.hpp"
#include "mor/projection.hpp"

namespace mor {
namespace {

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

struct Case {
  LtiSystem sys;
  DrFamily fam;
};

Case random_family(int n, int r, std::uint64_t seed) {
  LtiSystem h = test::random_stable(n, seed);
  std::mt19937_64 rng(seed);
  const auto pts = test::random_rhp_points(r, rng);
  DrFamily fam(realify(project(h, build_basis(h, pts))));
  return {std::move(h), std::move(fam)};
}

TEST(DrFamily, ScalarToyStability) {
  const DrFamily fam(scalar_core());
  EXPECT_FALSE(stability_of(fam, 2.0, 0.0).stable);
  const DrCandidate half = stability_of(fam, 0.5, 0.0);
  EXPECT_TRUE(half.stable);
  EXPECT_NEAR(half.margin, 0.5, 1e-14);
  const ReducedModel m = assemble_statespace(fam, 2.0);
  EXPECT_NEAR(std::abs(poles(m)[0] - 1.0), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(m.dr, 2.0);
}

TEST(DrFamily, ZeroShiftIsCore) {
  const Case c = random_family(12, 4, 3);
  const ReducedModel m = assemble_statespace(c.fam, 0.0);
  EXPECT_EQ(m.dr, 0.0);
  for (const cplx s : {cplx(0.0, 0.4), cplx(1.0, -2.0)}) {
    EXPECT_EQ(eval_family(c.fam, s, 0.0), c.fam.terms(s).h0);
    EXPECT_LE(test::rel_diff(eval(m, s), eval(c.fam.core(), s)), 1e-13);
  }
  EXPECT_EQ(stability_of(c.fam, 0.0, 0.0).stable, is_stable(c.fam.core().to_system()));
}

TEST(DrFamily, CoreMustBeReal) {
  const LtiSystem h = test::random_stable(6, 2);
  EXPECT_THROW(DrFamily(project(h, build_basis(h, {cplx(1.0, 1.0), cplx(1.0, -1.0)}))), Error);
}

TEST(DrFamily, GIdentitiesAtInterpolationPoints) {
  for (int t = 0; t < 10; ++t) {
    const Case c = random_family(10 + t, 1 + t % 6, 60 + t);
    for (const cplx s : c.fam.core().points) {
      const auto g = c.fam.terms(s);
      EXPECT_LE(std::abs(g.g1 - 1.0), 1e-8) << "case " << t;
      EXPECT_LE(std::abs(g.g2 - 1.0), 1e-8) << "case " << t;
    }
  }
}

TEST(DrFamily, InterpolationInvariance) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int t = 0; t < 12; ++t) {
    const Case c = random_family(10 + 2 * t, 1 + t % 6, 300 + t);
    for (int k = 0; k < 20; ++k) {
      const double dr = nd(rng) * std::pow(10.0, -2.0 + 4.0 * (k % 5) / 4.0);
      const ReducedModel m = assemble_statespace(c.fam, dr);
      for (const cplx s : c.fam.core().points) {
        const TransferSample ref = eval_deriv(c.sys, s);
        const cplx v = eval_family(c.fam, s, dr);
        EXPECT_LE(std::abs(v - ref.value), 1e-8 * (1.0 + std::abs(ref.value))) << "case " << t << " dr " << dr;
        const TransferSample ms = eval_deriv(m, s);
        EXPECT_LE(std::abs(ms.value - ref.value), 1e-8 * (1.0 + std::abs(ref.value)));
        EXPECT_LE(std::abs(ms.derivative - ref.derivative), 1e-6 * (1.0 + std::abs(ref.derivative)));
        const double h = 1e-5 * (1.0 + std::abs(s));
        const cplx fd = (eval_family(c.fam, s + h, dr) - eval_family(c.fam, s - h, dr)) / (2.0 * h);
        EXPECT_LE(std::abs(fd - ref.derivative), 1e-6 * (1.0 + std::abs(ref.derivative)));
      }
    }
  }
}

TEST(DrFamily, ShermanMorrisonExpansion) {
  const Case c = random_family(14, 4, 17);
  const DrFamily& f = c.fam;
  const cplx s(0.3, 1.7);
  const double dr = 0.37;
  const CMat M = s * f.Er().cast<cplx>() - f.Ar().cast<cplx>();
  const CVec w = f.w_ones().cast<cplx>(), u = f.u_ones().cast<cplx>(), b = f.br().cast<cplx>();
  const CVec direct = (M - dr * w * u.transpose()).partialPivLu().solve(b);
  const CVec x0 = M.partialPivLu().solve(b), y = M.partialPivLu().solve(w);
  const auto g = f.terms(s);
  const CVec expanded = x0 + dr * y * g.g1 / (1.0 - dr * g.g3);
  EXPECT_LE((direct - expanded).norm(), 1e-10 * direct.norm());
}

TEST(DrFamily, IncrementModelMatchesClosedForm) {
  const Case c = random_family(16, 3, 21);
  for (const double dr : {-0.3, 0.05, 1.2}) {
    const DenseModel inc = increment_model(c.fam, dr);
    EXPECT_EQ(inc.order(), 2 * c.fam.order());
    const cplx s(0.0, 0.9);
    const cplx want = eval_family(c.fam, s, dr) - c.fam.terms(s).h0;
    EXPECT_LE(std::abs(eval(inc, s) - want), 1e-10 * (1.0 + std::abs(want)));
  }
}

TEST(DrFamily, ExplicitDrPlacesExtraPoint) {
  const Case c = random_family(20, 3, 44);
  const double se = 4.0;
  const double dr = explicit_dr(c.fam, c.sys, se);
  EXPECT_LE(test::rel_diff(eval_family(c.fam, se, dr), eval(c.sys, se)), 1e-8);
  EXPECT_THROW(explicit_dr(c.fam, c.sys, -1.0), Error);
}

TEST(DrFamily, ExplicitDrVanishesForExactModel) {
  const LtiSystem h = test::first_order(1.0);
  const DrFamily fam(realify(project(h, build_basis(h, {1.0}))));
  for (const double se : {0.5, 2.0, 10.0}) EXPECT_NEAR(explicit_dr(fam, h, se), 0.0, 1e-12);
}

TEST(DrFamily, FamilyPoleDetected) {
  const DrFamily fam(scalar_core());
  // G3(s) = 1/(s+1); 1 - dr G3 vanishes at s = dr - 1.
  EXPECT_THROW(eval_family(fam, cplx(1.0, 0.0), 2.0), Error);
}

}  // namespace
}  // namespace mor
