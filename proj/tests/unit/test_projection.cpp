#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "mor/error.hpp"
#include "mor/projection.hpp"

namespace mor {
namespace {

using test::first_order;

// Largest relative distance from a pole of `a` to its nearest unused pole of `b`.
double pole_mismatch(const std::vector<cplx>& a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const cplx& p : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx x, cplx y) { return std::abs(x - p) < std::abs(y - p); });
    worst = std::max(worst, std::abs(*it - p) / (1.0 + std::abs(p)));
    b.erase(it);
  }
  return worst;
}

TEST(Basis, FirstOrderUnscaled) {
  const InterpolationBasis B = build_basis(first_order(1.0), {1.0}, ColumnScaling::none);
  EXPECT_NEAR(std::abs(B.V(0, 0) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(B.W(0, 0) - 0.5), 0.0, 1e-15);
}

TEST(Basis, FirstOrderUnitColumn) {
  const InterpolationBasis B = build_basis(first_order(1.0), {1.0}, ColumnScaling::unit_column);
  EXPECT_NEAR(std::abs(B.V(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(B.v_scales(0), 2.0, 1e-15);
}

TEST(Basis, DuplicateShiftsRejected) {
  const LtiSystem h = test::random_stable(4, 1);
  try {
    build_basis(h, {1.0, 1.0});
    FAIL() << "expected RankDeficient";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficient);
  }
}

TEST(Basis, MissingConjugateRejected) {
  const LtiSystem h = test::random_stable(4, 1);
  EXPECT_THROW(build_basis(h, {cplx(1.0, 1.0), cplx(2.0, 0.0)}), Error);
}

TEST(Basis, SamplesMatchEvaluation) {
  const LtiSystem h = test::random_stable(8, 3);
  const InterpolationBasis B = build_basis(h, {cplx(0.5, 1.0), cplx(0.5, -1.0), 2.0});
  for (const auto& smp : B.samples) {
    const TransferSample ref = eval_deriv(h, smp.point);
    EXPECT_LE(std::abs(smp.value - ref.value), 1e-12 * std::abs(ref.value));
    EXPECT_LE(std::abs(smp.derivative - ref.derivative), 1e-12 * std::abs(ref.derivative));
  }
}

TEST(Project, InterpolatesFirstOrder) {
  const LtiSystem h = first_order(1.0);
  const ReducedModel m = project(h, build_basis(h, {1.0}));
  EXPECT_NEAR(std::abs(eval(m, 1.0) - 0.5), 0.0, 1e-14);
}

TEST(Project, ExactRecoveryOfOrderR) {
  for (int r : {2, 3, 5}) {
    const LtiSystem h = test::random_stable(r, 40 + r);
    std::mt19937_64 rng(r);
    const ReducedModel m = project(h, build_basis(h, test::random_rhp_points(r, rng)));
    const auto pf = poles(h), pr = poles(m);
    ASSERT_EQ(pf.size(), pr.size());
    EXPECT_LE(pole_mismatch(pf, pr), 1e-8);
    EXPECT_LE(test::rel_diff(eval(m, cplx(0.3, 4.0)), eval(h, cplx(0.3, 4.0))), 1e-9);
  }
}

TEST(Project, HermiteInterpolationProperty) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    const int n = 8 + 3 * (t % 15);
    const int r = 1 + t % 6;
    const LtiSystem h = test::random_stable(n, 500 + t);
    const auto pts = test::random_rhp_points(r, rng);
    const ReducedModel m = project(h, build_basis(h, pts));
    for (const cplx s : pts) {
      const TransferSample full = eval_deriv(h, s), red = eval_deriv(m, s);
      EXPECT_LE(std::abs(full.value - red.value), 1e-8 * (1.0 + std::abs(full.value))) << "case " << t;
      EXPECT_LE(std::abs(full.derivative - red.derivative), 1e-6 * (1.0 + std::abs(full.derivative))) << "case " << t;
    }
  }
}

TEST(Project, ScalingDoesNotChangeTransferFunction) {
  std::mt19937_64 rng(5);
  const LtiSystem h = test::random_stable(20, 6);
  const auto pts = test::random_rhp_points(5, rng);
  const ReducedModel a = project(h, build_basis(h, pts, ColumnScaling::none));
  const ReducedModel b = project(h, build_basis(h, pts, ColumnScaling::unit_column));
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 20; ++i) {
    const cplx s(std::abs(u(rng)) + 0.01, u(rng));
    EXPECT_LE(test::rel_diff(eval(a, s), eval(b, s)), 1e-10);
  }
}

TEST(Project, ScaledOnesIdentity) {
  std::mt19937_64 rng(8);
  const LtiSystem h = test::random_stable(15, 8);
  const auto pts = test::random_rhp_points(4, rng);
  const InterpolationBasis B = build_basis(h, pts, ColumnScaling::unit_column);
  const ReducedModel m = project(h, B);
  for (int k = 0; k < B.size(); ++k) {
    const CVec x = (B.points[k] * m.Er - m.Ar).partialPivLu().solve(m.br);
    for (int i = 0; i < B.size(); ++i) {
      const cplx want = i == k ? cplx(1.0 / B.v_scales(k)) : cplx(0.0);
      EXPECT_LE(std::abs(x(i) - want), 1e-8 * (1.0 + std::abs(want)));
    }
  }
}

TEST(Realify, RealShiftsUnchangedAndComplexBecomeReal) {
  const LtiSystem h = test::random_stable(10, 12);
  const ReducedModel real_pts = project(h, build_basis(h, {0.5, 2.0}));
  const ReducedModel rr = realify(real_pts);
  EXPECT_LE((rr.Ar - real_pts.Ar).norm(), 1e-14 * real_pts.Ar.norm());

  const ReducedModel cm = project(h, build_basis(h, {cplx(0.4, 1.2), cplx(0.4, -1.2), 3.0}));
  const ReducedModel rm = realify(cm);
  EXPECT_LE(rm.Ar.imag().norm(), 1e-12 * rm.Ar.norm());
  EXPECT_LE(rm.br.imag().norm(), 1e-12 * rm.br.norm());
  EXPECT_LE(test::rel_diff(eval(rm, cplx(0.1, 0.9)), eval(cm, cplx(0.1, 0.9))), 1e-12);
  EXPECT_NO_THROW(rm.to_system());
}

TEST(CanonicalOrder, PairsAdjacent) {
  const auto p = canonical_shift_order({cplx(1.0, -2.0), 3.0, cplx(1.0, 2.0)});
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0], cplx(3.0, 0.0));
  EXPECT_GT(p[1].imag(), 0.0);
  EXPECT_EQ(p[2], std::conj(p[1]));
  EXPECT_THROW(canonical_shift_order({cplx(1.0, 2.0)}), Error);
}

}  // namespace
}  // namespace mor
