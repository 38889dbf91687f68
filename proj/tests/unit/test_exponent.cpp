#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "pxharm/exponent.hpp"
#include "pxharm/grid.hpp"
#include "pxharm/modular.hpp"

using namespace pxharm;

namespace {

const Box kUnit{Vec2(0.0, 0.0), Vec2(1.0, 1.0)};

GridPtr unit_square(double h = 1.0 / 16) { return build_grid(Domain::square(1.0), h); }

ScalarField constant_field(const GridPtr& g, double c) {
  return ScalarField::sample(g, [c](const Vec2&) { return c; });
}

}  // namespace

TEST(Exponent, ConstantHasNoVariation) {
  const auto p = make_exponent("constant", {2.0});
  EXPECT_EQ(p.eval(Vec2(0.3, -1.7)), 2.0);
  EXPECT_EQ(p.grad(Vec2(1.0, 1.0)).norm(), 0.0);
  EXPECT_EQ(p.lip_const(), 0.0);
  EXPECT_EQ(p.clog(), 0.0);
  EXPECT_TRUE(p.is_constant());
}

TEST(Exponent, AffineTouchingOneOnDefaultBoxIsRejected) {
  EXPECT_THROW(make_exponent("affine", {2.0, 0.5, 0.0}), PreconditionError);
}

TEST(Exponent, AffineEvaluationAndLipschitz) {
  const auto p = make_exponent("affine", {2.0, 0.5, 0.0}, Box{Vec2(-1, -1), Vec2(1, 1)});
  EXPECT_DOUBLE_EQ(p.eval(Vec2(0.4, 0.9)), 2.2);
  EXPECT_DOUBLE_EQ(p.lip_const(), 0.5);
  EXPECT_DOUBLE_EQ(p.p_minus(), 1.5);
  EXPECT_DOUBLE_EQ(p.p_plus(), 2.5);
}

TEST(Exponent, AffineBoundsAtBoxCorners) {
  const auto p = make_exponent("affine", {3.0, 0.25, 0.0});
  EXPECT_DOUBLE_EQ(p.p_minus(), 2.5);
  EXPECT_DOUBLE_EQ(p.p_plus(), 3.5);
}

TEST(Exponent, ParseCompactSpecs) {
  EXPECT_EQ(parse_exponent("const:3").eval(Vec2(1, 1)), 3.0);
  const auto a = parse_exponent("affine:3:0.25,0.1");
  EXPECT_DOUBLE_EQ(a.eval(Vec2(1.0, 1.0)), 3.35);
  const auto b = parse_exponent("bump:2:0.5:0,0:1");
  EXPECT_NEAR(b.eval(Vec2::Zero()), 2.5, 1e-15);
  EXPECT_THROW(parse_exponent("cubic:2"), PreconditionError);
}

TEST(Exponent, ConjugateIsPointwise) {
  const auto p = make_exponent("affine", {3.0, 0.25, 0.0});
  const auto q = p.conjugate();
  for (const Vec2& x : {Vec2(0.0, 0.0), Vec2(1.5, -0.2), Vec2(-2.0, 2.0)}) {
    const double px = p.eval(x);
    EXPECT_NEAR(q.eval(x), px / (px - 1.0), 1e-14);
    EXPECT_NEAR(1.0 / px + 1.0 / q.eval(x), 1.0, 1e-14);
  }
}

TEST(Exponent, LogHolderConstant) {
  const std::vector<std::pair<Vec2, Vec2>> pairs{{Vec2(0, 0), Vec2(0.1, 0)}, {Vec2(-0.5, 0.2), Vec2(-0.4, 0.2)}};
  EXPECT_EQ(check_log_holder(make_exponent("constant", {2.0}), pairs), 0.0);
  const auto p = make_exponent("affine", {2.0, 0.5, 0.0}, Box{Vec2(-1, -1), Vec2(1, 1)});
  const double L = check_log_holder(p, pairs);
  EXPECT_GT(L, 0.0);
  EXPECT_TRUE(std::isfinite(L));
  EXPECT_LE(L, p.clog() * (1 + 1e-12));
}

TEST(Modular, ConstantFieldsOnUnitSquare) {
  const auto g = unit_square();
  EXPECT_NEAR(modular(constant_field(g, 1.0), ExponentField::constant(2.0)), 1.0, 1e-12);
  EXPECT_NEAR(modular(constant_field(g, 2.0), ExponentField::constant(2.0)), 4.0, 1e-12);
  EXPECT_NEAR(modular(constant_field(g, 1.0), ExponentField::affine(2.0, Vec2(1.0, 0.0), kUnit)), 1.0, 1e-12);
}

TEST(Luxemburg, ConstantFieldsOnUnitSquare) {
  const auto g = unit_square();
  EXPECT_NEAR(luxemburg_norm(constant_field(g, 1.0), ExponentField::constant(2.0)), 1.0, 1e-12);
  EXPECT_NEAR(luxemburg_norm(constant_field(g, 3.0), ExponentField::constant(3.0)), 3.0, 1e-12);
  const auto p = ExponentField::affine(2.0, Vec2(0.5, 0.0), kUnit);
  const auto br = norm_modular_bracket(1.0, p);
  EXPECT_DOUBLE_EQ(br.lower, 1.0);
  EXPECT_DOUBLE_EQ(br.upper, 1.0);
  EXPECT_NEAR(luxemburg_norm(constant_field(g, 1.0), p), 1.0, 1e-12);
}

TEST(Luxemburg, ZeroField) {
  EXPECT_EQ(luxemburg_norm(constant_field(unit_square(), 0.0), ExponentField::constant(2.0)), 0.0);
}

class RandomFields : public ::testing::TestWithParam<int> {};

TEST_P(RandomFields, NormProperties) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto g = unit_square(1.0 / 12);
  const double p0 = 2.2 + 0.5 * U(rng), s1 = 0.4 * U(rng), s2 = 0.4 * U(rng);
  const auto p = ExponentField::affine(p0, Vec2(s1, s2), kUnit);
  const double a = 3.0 * U(rng), b = 2.0 * U(rng), c = U(rng);
  const auto u = ScalarField::sample(g, [&](const Vec2& x) { return a * std::sin(4 * x.x()) + b * x.y() * x.y() + c; });
  const double n = luxemburg_norm(u, p);
  ASSERT_GT(n, 0.0);

  auto unit = u;
  unit.values /= n;
  EXPECT_NEAR(modular(unit, p), 1.0, 1e-9);

  const auto br = norm_modular_bracket(modular(u, p), p);
  EXPECT_GE(n, br.lower * (1 - 1e-9));
  EXPECT_LE(n, br.upper * (1 + 1e-9));

  const double lambda = 0.1 + 5.0 * std::abs(U(rng));
  auto scaled = u;
  scaled.values *= -lambda;
  EXPECT_NEAR(luxemburg_norm(scaled, p), lambda * n, 1e-9 * lambda * n);

  // Modular is monotone in |u|.
  auto bigger = u;
  bigger.values = u.values.cwiseAbs() * 1.1;
  EXPECT_GT(modular(bigger, p), modular(u, p));
}

TEST_P(RandomFields, ConstantExponentNormIsLebesgueNorm) {
  std::mt19937_64 rng(100 + GetParam());
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto g = unit_square(1.0 / 12);
  const double q = 1.1 + 4.0 * U(rng);
  const auto u = ScalarField::sample(g, [&](const Vec2& x) { return std::cos(3 * x.x() + x.y()) + 0.2; });
  double s = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) s += g->quad_weights[i] * std::pow(std::abs(u[i]), q);
  EXPECT_NEAR(luxemburg_norm(u, ExponentField::constant(q)), std::pow(s, 1.0 / q), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomFields, ::testing::Range(1, 21));
