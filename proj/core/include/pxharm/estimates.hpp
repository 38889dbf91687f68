#pragma once

#include <utility>
#include <vector>

#include "pxharm/geometry.hpp"
#include "pxharm/grid.hpp"

namespace pxharm {

/// Least-squares fit of log(value / scale) = log(prefactor) + exponent * log(radius / r).
struct DecayFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  ///< rms of the log-log fit
  std::vector<double> radii;
  std::vector<double> values;
  double scale = 1.0;              ///< sup_{B(w,r)} u + r (or osc + r)
  double envelope_constant = 0.0;  ///< max_k value_k / ((radius_k / r)^exponent * scale)
  bool exponent_in_range = false;  ///< 0 < exponent <= 1
};

DecayFit fit_decay(const std::vector<double>& radii, const std::vector<double>& values, double r, double scale);

struct Window {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

struct RatioReport {
  double lower = 0.0;
  double upper = 0.0;
  Window window;
  double h = 0.0;
  std::size_t nodes = 0;
  Vec2 argmin = Vec2::Zero();
  Vec2 argmax = Vec2::Zero();
};

/// sup_{B(c,r)} u / (inf_{B(c,r)} u + r). Requires B(c, 4r) inside the domain.
double harnack_constant(const ScalarField& u, const Domain& domain, const Vec2& center, double r);

/// Composes per-ball constants along a chain: C = max_i sup_{B_i} u / (inf_{B_i} u + r_i)
/// and compares u(x) with C^N (u(y) + N r), r the largest chain radius.
struct ChainedHarnack {
  double C = 0.0;
  int N = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};
ChainedHarnack chained_harnack(const ScalarField& u, const HarnackChain& chain, const Vec2& x, const Vec2& y);

/// Dyadic fit of sup_{B(w,rho) ∩ domain} u against rho = r / 2^k, k = 1..levels,
/// keeping levels with rho >= 4h; needs at least 3.
DecayFit oscillation_decay(const ScalarField& u, const Vec2& w, double r, int levels);

/// Same fit on osc_{B(c,rho)} u for an interior ball B(c, r) of the domain.
DecayFit interior_oscillation_decay(const ScalarField& u, const Domain& domain, const Vec2& c, double r,
                                    int levels);

/// Smallest C with |u(x)-u(y)| <= C (|x-y|/r)^gamma (sup_{B(w,2r)} u + r) over the pairs.
struct HolderReport {
  double gamma = 0.0;
  double C = 0.0;
  std::size_t pairs = 0;
  std::size_t violations = 0;  ///< pairs above the reference constant
  double reference_C = 0.0;
};
HolderReport holder_boundary_check(const ScalarField& u, const Vec2& w, double r,
                                   const std::vector<std::pair<Vec2, Vec2>>& pairs, double gamma,
                                   double reference_C = 1.0);

struct CarlesonReport {
  double ratio = 0.0;
  double sup = 0.0;
  double corkscrew_value = 0.0;
  Vec2 corkscrew_point = Vec2::Zero();
  double r_prime = 0.0;
};
/// sup_{domain ∩ B(w, r')} u / (u(A_{r'}(w)) + r') with r' = r / c_prime.
CarlesonReport carleson_check(const ScalarField& u, const Domain& domain, const Vec2& w, double r,
                              double c_prime = 2.0);

/// inf and sup of u(x) r / d(x) over nodes of the window B(w, r / c_tilde) with d >= 2h.
RatioReport boundary_decay(const ScalarField& u, const Domain& domain, const Vec2& w, double r,
                           double c_tilde = 6.0);

struct BoundaryHarnackReport {
  RatioReport ratio;        ///< inf / sup of u / v
  double four_point = 0.0;  ///< sup (u(x)/v(x)) (v(y)/u(y)) = upper / lower
};
BoundaryHarnackReport boundary_harnack(const ScalarField& u, const ScalarField& v, const Domain& domain,
                                       const Vec2& w, double r, double c_tilde = 6.0);

/// Fit of log(u(x_k) / (u(a) + r')) against log(d(a) / d(x_k)) for points x_k on
/// the inward normal at w between the corkscrew point a = A_{r'}(w) and w.
DecayFit harnack_to_boundary(const ScalarField& u, const Domain& domain, const Vec2& w, double r_prime,
                             int levels = 5);

}  // namespace pxharm
