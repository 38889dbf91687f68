#pragma once

#include "pxharm/exponent.hpp"
#include "pxharm/grid.hpp"

namespace pxharm {

/// Nodal-quadrature approximation of the semimodular  int |u|^{p(x)} dx.
double modular(const ScalarField& u, const ExponentField& p);

/// Luxemburg norm inf{mu > 0 : modular(u / mu) <= 1}, found by bisection on
/// [1e-14, modular(u) + 1] to relative tolerance `rel_tol`.
double luxemburg_norm(const ScalarField& u, const ExponentField& p, double rel_tol = 1e-13);

/// Bracket min/max{rho^{1/p-}, rho^{1/p+}} that every Luxemburg norm obeys.
struct NormBracket {
  double lower;
  double upper;
};
NormBracket norm_modular_bracket(double modular_value, const ExponentField& p);

}  // namespace pxharm
