#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "pxharm/grid.hpp"
#include "pxharm/measure.hpp"
#include "pxharm/solver.hpp"

using namespace pxharm;

namespace {

constexpr double kH = 0.005;

GridPtr covering() {
  static const GridPtr g = build_covering_grid(Domain::slab(2.0), Box{Vec2(-0.6, -0.6), Vec2(0.6, 0.6)}, kH);
  return g;
}

ScalarField ramp(double a) {
  return ScalarField::sample(covering(), [a](const Vec2& x) { return a * std::max(0.0, x.y()); });
}

}  // namespace

TEST(RieszMeasure, ZeroFieldHasZeroMeasure) {
  const auto mu = riesz_measure(ramp(0.0), ExponentField::constant(3.0), Vec2::Zero(), 0.25);
  EXPECT_EQ(mu.total, 0.0);
  EXPECT_EQ(mu.mass(0.2), 0.0);
  EXPECT_FALSE(mu.atoms.empty());
}

TEST(RieszMeasure, UnitFluxGivesLengthMeasure) {
  for (double p : {2.0, 3.0}) {
    const auto mu = riesz_measure(ramp(1.0), ExponentField::constant(p), Vec2::Zero(), 0.25);
    for (double s : {0.05, 0.1, 0.2}) EXPECT_NEAR(mu.mass(s), 2.0 * s, 1.01 * kH);
    EXPECT_GE(mu.min_atom(), -1e-12);
  }
}

TEST(RieszMeasure, FluxScalesWithPowerOfSlope) {
  const auto p = ExponentField::constant(3.0);
  const auto a = riesz_measure(ramp(1.0), p, Vec2::Zero(), 0.25);
  const auto b = riesz_measure(ramp(2.0), p, Vec2::Zero(), 0.25);
  EXPECT_NEAR(b.mass(0.2), 4.0 * a.mass(0.2), 1e-9);
}

TEST(RieszMeasure, AdditivityOverAnnuli) {
  const auto mu = riesz_measure(ramp(1.0), ExponentField::constant(2.0), Vec2::Zero(), 0.25);
  EXPECT_NEAR(mu.mass(0.2), mu.mass(0.05) + mu.mass_between(0.05, 0.1) + mu.mass_between(0.1, 0.2), 1e-14);
  EXPECT_NEAR(mu.total, mu.mass(0.25), 1e-14);
}

TEST(RieszMeasure, IdentityWithSmoothTestFunction) {
  const auto p = ExponentField::constant(3.0);
  const auto u = ramp(1.5);
  const auto mu = riesz_measure(u, p, Vec2::Zero(), 0.25);
  const auto psi = ScalarField::sample(covering(), [](const Vec2& x) {
    const double t = 1.0 - x.squaredNorm() / 0.04;
    return t > 0.0 ? t * t * (1.0 + x.x()) : 0.0;
  });
  const auto id = riesz_identity(mu, u, p, psi);
  EXPECT_NEAR(id.measure_side, id.residual_side, 1e-10);
  EXPECT_LT(id.measure_side, 0.0);
}

TEST(RieszMeasure, NonzeroExteriorIsRejected) {
  const auto u = ScalarField::sample(covering(), [](const Vec2& x) { return x.y() + 1.0; });
  EXPECT_THROW(riesz_measure(u, ExponentField::constant(2.0), Vec2::Zero(), 0.25), PreconditionError);
}

TEST(RieszMeasure, ZeroExtendedSolutionIsSubsolutionNearBoundary) {
  const auto g = build_covering_grid(Domain::disk(1.0), Box{Vec2(-0.5, -1.5), Vec2(0.5, -0.5)}, 0.01);
  const auto p = ExponentField::affine(2.0, Vec2(0.3, 0.0));
  std::vector<char> pinned(g->size(), 0);
  auto start = ScalarField::zeros(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (g->node_kind[i] == NodeKind::Interior) continue;
    pinned[i] = 1;
    if (g->node_kind[i] == NodeKind::Boundary && g->dist[i] > 0.0) start.values[static_cast<Eigen::Index>(i)] = 0.4;
  }
  SolveOptions o;
  const auto s = minimize_energy(start, pinned, p, o);
  ASSERT_TRUE(s.report.converged);
  const auto mu = riesz_measure(s.u, p, Vec2(0.0, -1.0), 0.3);
  EXPECT_GT(mu.total, 0.0);
  EXPECT_GE(mu.min_atom(), -1e-9);
  for (std::size_t k = 0; k < mu.nodes.size(); k += 7) {
    if (g->on_hull[mu.nodes[k]]) continue;
    EXPECT_LE(weak_residual(s.u, p, hat(g, mu.nodes[k])), 1e-9);
  }
}

TEST(DoublingExponents, Formulas) {
  const auto a = doubling_exponents(4.0, 3.0, 3.0);
  EXPECT_EQ(a.alpha, 0.0);
  EXPECT_NEAR(a.beta, 1.5, 1e-12);
  const auto b = doubling_exponents(5.0, 2.5, 3.0);
  EXPECT_GT(b.alpha, 0.0);
  EXPECT_GT(b.beta, 0.0);
  EXPECT_TRUE(std::isfinite(b.alpha) && std::isfinite(b.beta));
  EXPECT_THROW(doubling_exponents(2.0, 2.5, 3.0), PreconditionError);
  EXPECT_THROW(doubling_exponents(5.0, 3.0, 2.5), PreconditionError);
}

TEST(DoublingExponents, ConstantExponentSweep) {
  for (double n : {3.0, 4.0, 6.0})
    for (double p = 2.05; p < n; p += 0.3) {
      const auto d = doubling_exponents(n, p, p);
      EXPECT_EQ(d.alpha, 0.0);
      EXPECT_NEAR(d.beta, (n - 1.0) / (p - 1.0), 1e-12);
    }
}

TEST(Doubling, EmptyMeasureHasNoConstant) {
  const auto p = ExponentField::constant(3.0);
  const auto mu = riesz_measure(ramp(0.0), p, Vec2::Zero(), 0.25);
  const auto rep = doubling_check(mu, p, 2, Vec2::Zero(), 0.1);
  EXPECT_TRUE(rep.empty);
}

TEST(Doubling, HalfPlaneRatioIsTwo) {
  const auto p = ExponentField::constant(2.5);
  const auto mu = riesz_measure(ramp(1.0), p, Vec2::Zero(), 0.25);
  const auto rep = doubling_check(mu, p, 2, Vec2::Zero(), 0.1);
  EXPECT_NEAR(rep.ratio, 2.0, 0.1);
  EXPECT_FALSE(rep.empty);
  EXPECT_FALSE(rep.flagged);
  EXPECT_FALSE(all_hold(rep.hypotheses));
}

TEST(GrowthBounds, TwoDimensionalChecksAreFlagged) {
  const auto p = ExponentField::constant(2.5);
  const auto u = ramp(1.0);
  const auto mu = riesz_measure(u, p, Vec2::Zero(), 0.25);
  const auto up = upper_bound_check(mu, u, p, 2, Vec2::Zero(), 0.05);
  EXPECT_GT(up.constant, 0.0);
  EXPECT_TRUE(std::isfinite(up.constant));
  EXPECT_FALSE(all_hold(up.hypotheses));
  const auto lo = lower_bound_check(mu, u, p, 2, Vec2::Zero(), 0.1);
  EXPECT_GT(lo.constant, 0.0);
  EXPECT_FALSE(all_hold(lo.hypotheses));
  EXPECT_TRUE(std::isfinite(lo.constant));
}

TEST(Caccioppoli, ConstantFieldHasZeroLeftSide) {
  const auto g = build_grid(Domain::disk(1.0), 0.02);
  const auto u = ScalarField::sample(g, [](const Vec2&) { return 1.0; });
  const auto rep = caccioppoli_check(u, ExponentField::constant(2.0), Cutoff{Vec2::Zero(), 0.2});
  EXPECT_EQ(rep.lhs, 0.0);
  EXPECT_GT(rep.rhs, 0.0);
}

TEST(Caccioppoli, HalfPlaneRampClosedForm) {
  // u = max(x2, 0), p = 2: both sides are radial integrals, ratio 22/45.
  const auto rep = caccioppoli_check(ramp(1.0), ExponentField::constant(2.0), Cutoff{Vec2::Zero(), 0.2});
  const double r = 0.2;
  EXPECT_NEAR(rep.lhs, 11.0 * std::numbers::pi * r * r / 12.0, 0.01 * rep.lhs);
  EXPECT_NEAR(rep.rhs, 15.0 * std::numbers::pi * r * r / 8.0, 0.01 * rep.rhs);
  EXPECT_NEAR(rep.ratio, 22.0 / 45.0, 0.01);
}

TEST(Caccioppoli, CutoffMustFitInMesh) {
  EXPECT_THROW(caccioppoli_check(ramp(1.0), ExponentField::constant(2.0), Cutoff{Vec2::Zero(), 0.4}), PreconditionError);
}

TEST(Cutoff, ProfileAndGradient) {
  const Cutoff eta{Vec2(0.1, 0.0), 0.2};
  EXPECT_EQ(eta.value(Vec2(0.2, 0.0)), 1.0);
  EXPECT_NEAR(eta.value(Vec2(0.4, 0.0)), 0.5, 1e-15);
  EXPECT_EQ(eta.value(Vec2(0.6, 0.0)), 0.0);
  EXPECT_NEAR(eta.grad(Vec2(0.4, 0.0)).norm(), 5.0, 1e-12);
}

TEST(MeasureCsv, HeaderAndRows) {
  const auto mu = riesz_measure(ramp(1.0), ExponentField::constant(2.0), Vec2::Zero(), 0.02);
  std::ostringstream out;
  write_measure_csv(out, mu);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("x,y,atom\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), mu.atoms.size() + 1);
}

TEST(UnitBall, Volumes) {
  EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
}
