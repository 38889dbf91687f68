#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pxharm/barriers.hpp"

using namespace pxharm;

namespace {

const Box kBox{Vec2(-1.0, -1.0), Vec2(1.0, 1.0)};

BarrierSpec spec(BarrierFamily f, double r, double mu, double M = 1.0, Vec2 c = Vec2::Zero()) {
  BarrierSpec s;
  s.family = f;
  s.radius = r;
  s.mu = mu;
  s.height = M;
  s.center = c;
  return s;
}

Vec2 at(const Vec2& c, double rho, double theta) { return c + rho * Vec2(std::cos(theta), std::sin(theta)); }

}  // namespace

TEST(BarrierEval, BoundaryValues) {
  const Vec2 y(0.3, -0.1);
  const double r = 0.1, M = 2.5;
  for (double th : {0.0, 1.0, 4.0}) {
    EXPECT_NEAR(eval(spec(BarrierFamily::WolanskiSuper, r, 3.0, M, y), at(y, 2 * r, th)).value, M, 1e-12);
    EXPECT_NEAR(eval(spec(BarrierFamily::WolanskiSub, r, 3.0, M, y), at(y, r, th)).value, M, 1e-12);
    EXPECT_NEAR(eval(spec(BarrierFamily::WolanskiSuper, r, 3.0, M, y), at(y, r, th)).value, 0.0, 1e-12);
  }
}

TEST(BarrierEval, PowerBarrierArithmetic) {
  const double r = 0.2, M = 1.5;
  const auto j = eval(spec(BarrierFamily::BaumanSuper, r, 1.0, M), Vec2(1.5 * r, 0.0));
  EXPECT_NEAR(j.value, 2.0 / 3.0 * M, 1e-14);
}

TEST(BarrierEval, SubIsHeightMinusSuper) {
  const Vec2 x(0.13, 0.07);
  for (auto [sup, sub] : {std::pair{BarrierFamily::WolanskiSuper, BarrierFamily::WolanskiSub},
                          std::pair{BarrierFamily::BaumanSuper, BarrierFamily::BaumanSub}}) {
    const auto a = eval(spec(sup, 0.1, 2.0, 1.3), x);
    const auto b = eval(spec(sub, 0.1, 2.0, 1.3), x);
    EXPECT_NEAR(a.value + b.value, 1.3, 1e-13);
    EXPECT_NEAR((a.grad + b.grad).norm(), 0.0, 1e-12);
    EXPECT_NEAR(a.laplacian + b.laplacian, 0.0, 1e-9 * std::abs(a.laplacian));
  }
}

TEST(BarrierEval, JetMatchesFiniteDifferences) {
  const Vec2 x(0.12, 0.09);
  const double h = 1e-5;
  for (auto f : {BarrierFamily::WolanskiSuper, BarrierFamily::BaumanSub}) {
    const auto s = spec(f, 0.1, 2.5, 1.0);
    const auto j = eval(s, x);
    const auto v = [&](double dx, double dy) { return eval(s, x + Vec2(dx, dy)).value; };
    const Vec2 g((v(h, 0) - v(-h, 0)) / (2 * h), (v(0, h) - v(0, -h)) / (2 * h));
    EXPECT_NEAR((g - j.grad).norm(), 0.0, 1e-6 * j.grad.norm());
    const double lap = (v(h, 0) + v(-h, 0) + v(0, h) + v(0, -h) - 4 * j.value) / (h * h);
    EXPECT_NEAR(lap, j.laplacian, 1e-3 * std::abs(j.laplacian) + 1e-3);
  }
}

TEST(BarrierEval, OutsideAnnulusThrows) {
  EXPECT_THROW(eval(spec(BarrierFamily::WolanskiSuper, 0.1, 2.0), Vec2(0.05, 0.0)), PreconditionError);
  EXPECT_THROW(eval(spec(BarrierFamily::WolanskiSuper, 0.1, 2.0), Vec2(0.25, 0.0)), PreconditionError);
}

TEST(WolanskiRadius, Examples) {
  EXPECT_DOUBLE_EQ(wolanski_r_star(ExponentField::affine(2.0, Vec2(1.0, 0.0), Box{Vec2(0, 0), Vec2(1, 1)})), 0.25);
  EXPECT_DOUBLE_EQ(wolanski_r_star(ExponentField::constant(3.0)), 0.25);
  const auto steep = ExponentField::affine(1.5, Vec2(5.0, 0.0), Box{Vec2(0, 0), Vec2(0.1, 0.1)});
  ASSERT_DOUBLE_EQ(steep.p_minus(), 1.5);
  EXPECT_NEAR(wolanski_r_star(steep), 0.025, 1e-15);
}

TEST(WolanskiThreshold, ConstantExponents) {
  EXPECT_NEAR(wolanski_mu_star(ExponentField::constant(2.0), 1.0, 0.1), 1.0, 1e-6);
  EXPECT_NEAR(wolanski_mu_star(ExponentField::constant(3.0), 1.0, 0.1), 1.0, 1e-6);
}

TEST(WolanskiThreshold, MuTermCancelsAtCriticalRadius) {
  const auto p = ExponentField::affine(1.5, Vec2(0.5, 0.0), Box{Vec2(0, 0), Vec2(1, 1)});
  const double r0 = wolanski_r_star(p);
  ASSERT_NEAR(r0, 0.25, 1e-15);
  EXPECT_THROW(wolanski_mu_star(p, 1.0, r0), NumericalError);
  EXPECT_TRUE(std::isfinite(wolanski_mu_star(p, 1.0, 0.5 * r0)));
}

TEST(WolanskiThreshold, AffineExponentIsFiniteAboveOne) {
  const auto p = ExponentField::affine(2.0, Vec2(0.5, 0.0), kBox);
  const double mu = wolanski_mu_star(p, 1.0, 0.1);
  EXPECT_GT(mu, 1.0);
  EXPECT_TRUE(std::isfinite(mu));
  EXPECT_LE(wolanski_condition(p, 1.0, 0.1, mu), 1e-9);
  EXPECT_GT(wolanski_condition(p, 1.0, 0.1, 0.99 * mu), 0.0);
}

TEST(BaumanThreshold, Examples) {
  EXPECT_DOUBLE_EQ(bauman_mu_star(3.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(bauman_mu_star(2.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(bauman_mu_star(2.0, 1.5), 3.0);
}

TEST(BaumanRadius, Examples) {
  EXPECT_DOUBLE_EQ(bauman_r_double_star(1.0, 2.0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(bauman_r_double_star(1.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(bauman_r_star(ExponentField::constant(2.0), 1.0, 3, 2.0), 0.25);
}

TEST(Certify, RejectsInadmissibleParametersUnlessForced) {
  const auto p = ExponentField::constant(2.0, kBox);
  auto s = spec(BarrierFamily::WolanskiSuper, 0.1, 0.5);
  EXPECT_THROW(certify(s, p), PreconditionError);
  CertifyOptions o;
  o.force = true;
  o.samples = 400;
  const auto rep = certify(s, p, 2, o);
  EXPECT_TRUE(rep.forced);
}

TEST(Certify, ForcedSubThresholdSupersolutionFails) {
  // For p = 2 the sign condition needs mu >= 1.
  CertifyOptions o;
  o.force = true;
  o.samples = 2000;
  const auto rep = certify(spec(BarrierFamily::WolanskiSuper, 0.1, 0.2), ExponentField::constant(2.0, kBox), 2, o);
  EXPECT_FALSE(rep.passed);
  EXPECT_GT(rep.worst_sign, 0.0);
}

class CertifyRandom : public ::testing::TestWithParam<int> {};

TEST_P(CertifyRandom, AdmissibleBarriersPass) {
  std::mt19937_64 rng(GetParam());
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double p0 = 2.0 + 0.5 * U(rng), a1 = 0.4 * U(rng), a2 = 0.4 * U(rng);
  const auto p = ExponentField::affine(p0, Vec2(a1, a2), kBox);
  const double c1 = 0.3 * U(rng), c2 = 0.3 * U(rng);
  const Vec2 c(c1, c2);
  const double M = 0.5 + std::abs(U(rng));
  for (auto f : {BarrierFamily::WolanskiSuper, BarrierFamily::WolanskiSub, BarrierFamily::BaumanSuper,
                 BarrierFamily::BaumanSub}) {
    BarrierSpec s = spec(f, 0.0, 0.0, M, c);
    if (is_wolanski(f)) {
      s.radius = std::min(0.1, 0.5 * wolanski_r_star(p));
      s.mu = wolanski_mu_star(p, M, s.radius);
    } else {
      s.mu = bauman_mu_default(p);
      s.radius = std::min(0.1, bauman_r_star(p, M, 2, s.mu));
    }
    CertifyOptions o;
    o.samples = 2500;
    const auto rep = certify(s, p, 2, o);
    EXPECT_TRUE(rep.passed) << to_string(f) << " worst " << rep.worst_sign;
    EXPECT_TRUE(rep.boundary_exact);
    EXPECT_TRUE(rep.annulus_in_box);
    EXPECT_EQ(rep.samples, 2500u);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CertifyRandom, ::testing::Range(1, 9));

TEST(BarrierFamilies, NamesRoundTrip) {
  for (auto f : {BarrierFamily::WolanskiSuper, BarrierFamily::WolanskiSub, BarrierFamily::BaumanSuper,
                 BarrierFamily::BaumanSub})
    EXPECT_EQ(parse_barrier_family(to_string(f)), f);
  EXPECT_THROW(parse_barrier_family("gaussian"), std::exception);
  EXPECT_TRUE(is_super(BarrierFamily::BaumanSuper));
  EXPECT_FALSE(is_wolanski(BarrierFamily::BaumanSub));
}
