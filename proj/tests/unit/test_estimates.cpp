#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pxharm/estimates.hpp"
#include "pxharm/grid.hpp"
#include "pxharm/solver.hpp"

using namespace pxharm;

namespace {

const Domain& slab() {
  static const Domain d = Domain::slab(2.0);
  return d;
}

GridPtr slab_grid() {
  static const GridPtr g = build_grid(slab(), 0.01);
  return g;
}

ScalarField height_field() { return ScalarField::sample(slab_grid(), [](const Vec2& x) { return x.y(); }); }

}  // namespace

TEST(FitDecay, RecoversPowerLaw) {
  std::vector<double> radii, values;
  for (int k = 1; k <= 6; ++k) {
    radii.push_back(std::pow(0.5, k));
    values.push_back(3.0 * std::pow(radii.back() / 0.8, 0.7));
  }
  const auto fit = fit_decay(radii, values, 0.8, 1.5);
  EXPECT_NEAR(fit.exponent, 0.7, 1e-12);
  EXPECT_NEAR(fit.prefactor, 2.0, 1e-12);
  EXPECT_NEAR(fit.residual, 0.0, 1e-12);
  EXPECT_NEAR(fit.envelope_constant, 2.0, 1e-12);
  EXPECT_TRUE(fit.exponent_in_range);
}

TEST(Harnack, ConstantField) {
  const auto g = build_grid(Domain::disk(1.0), 0.05);
  const auto u = ScalarField::sample(g, [](const Vec2&) { return 2.0; });
  EXPECT_NEAR(harnack_constant(u, Domain::disk(1.0), Vec2::Zero(), 0.1), 2.0 / 2.1, 1e-14);
}

TEST(Harnack, LinearFieldInSlab) {
  EXPECT_NEAR(harnack_constant(height_field(), slab(), Vec2(0.0, 0.5), 0.1), 1.2, 1e-12);
  EXPECT_THROW(harnack_constant(height_field(), slab(), Vec2(0.0, 0.3), 0.1), PreconditionError);
}

TEST(Harnack, ChainedBoundHoldsForLinearField) {
  const auto chain = harnack_chain(slab(), Vec2::Zero(), 1.0, Vec2(0.0, 0.05), Vec2(0.1, 0.4));
  const auto rep = chained_harnack(height_field(), chain, Vec2(0.0, 0.05), Vec2(0.1, 0.4));
  EXPECT_TRUE(rep.holds);
  EXPECT_EQ(rep.N, chain.count);
  EXPECT_LE(rep.lhs, rep.rhs);
}

TEST(OscillationDecay, LinearFieldInHalfPlane) {
  const auto fit = oscillation_decay(height_field(), Vec2::Zero(), 0.5, 5);
  EXPECT_NEAR(fit.exponent, 1.0, 1e-9);
  EXPECT_LE(fit.envelope_constant, 1.0);
  EXPECT_EQ(fit.radii.size(), 3u);  // rho >= 4h keeps 0.25, 0.125, 0.0625
}

TEST(OscillationDecay, ReentrantCornerDecaysSlower) {
  const Domain L = Domain::l_shape(1.0, 0.05);
  const auto g = build_grid(L, 1.0 / 128);
  const auto s = solve_dirichlet(g, ExponentField::constant(2.0), [](const Vec2& x) { return x.norm(); });
  const Vec2 w = L.boundary_proj(Vec2(0.01, 0.01));
  const auto fit = oscillation_decay(s.u, w, 0.5, 4);
  EXPECT_LT(fit.exponent, 1.0);
  EXPECT_GT(fit.exponent, 0.0);
}

TEST(OscillationDecay, RejectsTooFewLevels) {
  EXPECT_THROW(oscillation_decay(height_field(), Vec2::Zero(), 0.05, 5), PreconditionError);
}

TEST(InteriorOscillation, LinearFieldHasUnitExponent) {
  const auto fit = interior_oscillation_decay(height_field(), slab(), Vec2(0.0, 1.0), 0.4, 4);
  EXPECT_NEAR(fit.exponent, 1.0, 1e-9);
}

TEST(Holder, VerticalPairsOfLinearField) {
  std::vector<std::pair<Vec2, Vec2>> pairs{{Vec2(0, 0.0), Vec2(0, 0.1)}, {Vec2(0, 0.05), Vec2(0, 0.3)},
                                           {Vec2(0.1, 0.2), Vec2(0.1, 0.2)}};
  const auto rep = holder_boundary_check(height_field(), Vec2::Zero(), 0.5, pairs, 1.0, 1.0);
  EXPECT_LE(rep.C, 1.0);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_EQ(rep.pairs, 3u);
}

TEST(Carleson, HalfPlaneRatioIsOneHalf) {
  const auto rep = carleson_check(height_field(), slab(), Vec2::Zero(), 0.2, 2.0);
  EXPECT_NEAR(rep.ratio, 0.5, 1e-9);
  EXPECT_NEAR(rep.r_prime, 0.1, 1e-15);
  EXPECT_NEAR(rep.corkscrew_point.y(), 0.1, 1e-12);
}

TEST(BoundaryDecay, LinearFieldRatioIsScale) {
  const auto rep = boundary_decay(height_field(), slab(), Vec2::Zero(), 0.6, 6.0);
  EXPECT_NEAR(rep.lower, 0.6, 1e-9);
  EXPECT_NEAR(rep.upper, 0.6, 1e-9);
  EXPECT_GT(rep.nodes, 10u);
}

TEST(BoundaryHarnack, ScaledAndEqualFields) {
  const auto u = height_field();
  auto v = u;
  v.values *= 2.0;
  const auto a = boundary_harnack(u, v, slab(), Vec2::Zero(), 0.6);
  EXPECT_NEAR(a.ratio.lower, 0.5, 1e-12);
  EXPECT_NEAR(a.ratio.upper, 0.5, 1e-12);
  EXPECT_NEAR(a.four_point, 1.0, 1e-12);
  const auto b = boundary_harnack(u, u, slab(), Vec2::Zero(), 0.6);
  EXPECT_NEAR(b.ratio.lower, 1.0, 1e-12);
  EXPECT_NEAR(b.ratio.upper, 1.0, 1e-12);
}

TEST(BoundaryHarnack, RequiresSameGrid) {
  const auto other = ScalarField::sample(build_grid(slab(), 0.02), [](const Vec2& x) { return x.y(); });
  EXPECT_THROW(boundary_harnack(height_field(), other, slab(), Vec2::Zero(), 0.6), PreconditionError);
}

class SolvedDisk : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto g = build_grid(Domain::disk(1.0), 1.0 / 48);
    const auto p = ExponentField::affine(2.0, Vec2(0.3, 0.0));
    u_ = new Solution(solve_dirichlet(g, p, [](const Vec2& x) { return std::max(0.0, x.y() + 0.5); }));
    v_ = new Solution(solve_dirichlet(g, p, [](const Vec2& x) { return std::max(0.0, x.y() + 0.5) * (2 + x.x()); }));
  }
  static void TearDownTestSuite() {
    delete u_;
    delete v_;
  }
  static Solution* u_;
  static Solution* v_;
};
Solution* SolvedDisk::u_ = nullptr;
Solution* SolvedDisk::v_ = nullptr;

TEST_F(SolvedDisk, RatioReportsAreScaleInvariant) {
  const Domain d = Domain::disk(1.0);
  const Vec2 w(0.0, -1.0);
  const auto a = boundary_harnack(u_->u, v_->u, d, w, 0.5);
  auto u3 = u_->u, v3 = v_->u;
  u3.values *= 3.0;
  v3.values *= 3.0;
  const auto b = boundary_harnack(u3, v3, d, w, 0.5);
  EXPECT_NEAR(a.ratio.lower, b.ratio.lower, 1e-12);
  EXPECT_NEAR(a.ratio.upper, b.ratio.upper, 1e-12);
  EXPECT_GT(a.ratio.lower, 0.0);
  EXPECT_TRUE(std::isfinite(a.ratio.upper));
}

TEST_F(SolvedDisk, SmallerWindowsGiveNestedRanges) {
  const Domain d = Domain::disk(1.0);
  const Vec2 w(0.0, -1.0);
  const auto wide = boundary_decay(u_->u, d, w, 0.5, 4.0);
  const auto narrow = boundary_decay(u_->u, d, w, 0.5, 8.0);
  EXPECT_GE(narrow.lower, wide.lower);
  EXPECT_LE(narrow.upper, wide.upper);
}

TEST_F(SolvedDisk, CarlesonRatioIsFinite) {
  const auto rep = carleson_check(u_->u, Domain::disk(1.0), Vec2(0.0, -1.0), 0.5);
  EXPECT_GT(rep.ratio, 0.0);
  EXPECT_LT(rep.ratio, 10.0);
}

TEST_F(SolvedDisk, HarnackToBoundaryReportsFit) {
  const auto fit = harnack_to_boundary(u_->u, Domain::disk(1.0), Vec2(0.0, -1.0), 0.25);
  EXPECT_TRUE(std::isfinite(fit.exponent));
  EXPECT_FALSE(fit.radii.empty());
}
