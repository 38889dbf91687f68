#include "pxharm/modular.hpp"

#include <algorithm>
#include <cmath>

namespace pxharm {

namespace {

double scaled_modular(const ScalarField& u, const std::vector<double>& exponents, double scale) {
  const Grid& g = *u.grid;
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = std::abs(u[i]) / scale;
    if (v == 0.0) continue;
    sum += g.quad_weights[i] * std::pow(v, exponents[i]);
  }
  return sum;
}

std::vector<double> nodal_exponents(const Grid& g, const ExponentField& p) {
  std::vector<double> e(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) e[i] = p.eval(g.nodes[i]);
  return e;
}

}  // namespace

double modular(const ScalarField& u, const ExponentField& p) {
  return scaled_modular(u, nodal_exponents(*u.grid, p), 1.0);
}

double luxemburg_norm(const ScalarField& u, const ExponentField& p, double rel_tol) {
  const auto exponents = nodal_exponents(*u.grid, p);
  const double rho = scaled_modular(u, exponents, 1.0);
  if (rho == 0.0) return 0.0;
  // modular(u / mu) is continuous and decreasing in mu; hi stays feasible.
  double lo = 1e-14;
  double hi = rho + 1.0;
  for (int it = 0; it < 400 && hi - lo > rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (scaled_modular(u, exponents, mid) <= 1.0 ? hi : lo) = mid;
  }
  return hi;
}

NormBracket norm_modular_bracket(double rho, const ExponentField& p) {
  const double a = std::pow(rho, 1.0 / p.p_minus());
  const double b = std::pow(rho, 1.0 / p.p_plus());
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace pxharm
