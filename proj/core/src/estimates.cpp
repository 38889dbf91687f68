#include "pxharm/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pxharm {

DecayFit fit_decay(const std::vector<double>& radii, const std::vector<double>& values, double r, double scale) {
  if (radii.size() != values.size() || radii.size() < 2) throw PreconditionError("need at least two levels to fit");
  DecayFit fit;
  fit.radii = radii;
  fit.values = values;
  fit.scale = scale;
  const std::size_t m = radii.size();
  std::vector<double> xs(m), ys(m);
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (!(values[k] > 0.0)) throw NumericalError("decay fit needs positive values");
    xs[k] = std::log(radii[k] / r);
    ys[k] = std::log(values[k] / scale);
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double rss = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double e = ys[k] - (my + fit.exponent * (xs[k] - mx));
    rss += e * e;
    fit.envelope_constant =
        std::max(fit.envelope_constant, values[k] / (std::pow(radii[k] / r, fit.exponent) * scale));
  }
  fit.residual = std::sqrt(rss / static_cast<double>(m));
  fit.exponent_in_range = fit.exponent > 0.0 && fit.exponent <= 1.0 + 1e-12;
  return fit;
}

double harnack_constant(const ScalarField& u, const Domain& domain, const Vec2& center, double r) {
  if (!(r > 0.0)) throw PreconditionError("radius must be positive");
  if (domain.signed_dist(center) < 4.0 * r * (1.0 - 1e-12)) throw PreconditionError("ball exits the domain");
  const BallExtrema e = ball_extrema(u, center, r);
  if (e.empty) throw PreconditionError("ball not resolved by the grid");
  return e.max / (e.min + r);
}

ChainedHarnack chained_harnack(const ScalarField& u, const HarnackChain& chain, const Vec2& x, const Vec2& y) {
  ChainedHarnack out;
  out.N = chain.count;
  double rmax = 0.0;
  for (const auto& b : chain.balls) {
    const BallExtrema e = ball_extrema(u, b.center, b.radius);
    if (e.empty) throw PreconditionError("chain ball not resolved by the grid");
    out.C = std::max(out.C, e.max / (e.min + b.radius));
    rmax = std::max(rmax, b.radius);
  }
  const CellLocator loc(u.grid);
  out.lhs = evaluate(u, loc, x);
  out.rhs = std::pow(std::max(out.C, 1.0), out.N) * (evaluate(u, loc, y) + out.N * rmax);
  out.holds = out.lhs <= out.rhs;
  return out;
}

namespace {

std::vector<double> dyadic_levels(double r, int levels, double h) {
  std::vector<double> radii;
  for (int k = 1; k <= levels; ++k) {
    const double rho = r / std::ldexp(1.0, k);
    if (rho >= 4.0 * h) radii.push_back(rho);
  }
  if (radii.size() < 3) throw PreconditionError("fewer than 3 resolvable levels");
  return radii;
}

}  // namespace

DecayFit oscillation_decay(const ScalarField& u, const Vec2& w, double r, int levels) {
  const auto radii = dyadic_levels(r, levels, u.grid->h);
  std::vector<double> sups;
  for (double rho : radii) sups.push_back(ball_extrema(u, w, rho).max);
  return fit_decay(radii, sups, r, ball_extrema(u, w, r).max + r);
}

DecayFit interior_oscillation_decay(const ScalarField& u, const Domain& domain, const Vec2& c, double r,
                                    int levels) {
  if (domain.signed_dist(c) < r) throw PreconditionError("interior ball exits the domain");
  const auto radii = dyadic_levels(r, levels, u.grid->h);
  std::vector<double> oscs;
  for (double rho : radii) {
    const BallExtrema e = ball_extrema(u, c, rho);
    oscs.push_back(e.max - e.min);
  }
  const BallExtrema e = ball_extrema(u, c, r);
  return fit_decay(radii, oscs, r, e.max - e.min + r);
}

HolderReport holder_boundary_check(const ScalarField& u, const Vec2& w, double r,
                                   const std::vector<std::pair<Vec2, Vec2>>& pairs, double gamma,
                                   double reference_C) {
  HolderReport rep;
  rep.gamma = gamma;
  rep.reference_C = reference_C;
  const double scale = ball_extrema(u, w, 2.0 * r).max + r;
  const CellLocator loc(u.grid);
  for (const auto& [x, y] : pairs) {
    const double dist = (x - y).norm();
    ++rep.pairs;
    if (dist == 0.0) continue;
    const double diff = std::abs(evaluate(u, loc, x) - evaluate(u, loc, y));
    const double c = diff / (std::pow(dist / r, gamma) * scale);
    rep.C = std::max(rep.C, c);
    if (c > reference_C) ++rep.violations;
  }
  return rep;
}

CarlesonReport carleson_check(const ScalarField& u, const Domain& domain, const Vec2& w, double r, double c_prime) {
  if (!(c_prime >= 1.0)) throw PreconditionError("c' must be at least 1");
  CarlesonReport rep;
  rep.r_prime = r / c_prime;
  rep.corkscrew_point = corkscrew(domain, w, rep.r_prime);
  rep.sup = ball_extrema(u, w, rep.r_prime).max;
  const CellLocator loc(u.grid);
  rep.corkscrew_value = evaluate(u, loc, rep.corkscrew_point);
  rep.ratio = rep.sup / (rep.corkscrew_value + rep.r_prime);
  return rep;
}

namespace {

template <class F>
RatioReport scan_window(const ScalarField& u, const Domain& domain, const Vec2& w, double radius, F&& ratio) {
  const Grid& g = *u.grid;
  RatioReport rep;
  rep.window = Window{w, radius};
  rep.h = g.h;
  rep.lower = std::numeric_limits<double>::infinity();
  rep.upper = -rep.lower;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.node_kind[i] == NodeKind::Exterior) continue;
    const Vec2& x = g.nodes[i];
    if ((x - w).norm() > radius) continue;
    const double d = domain.signed_dist(x);
    if (d < 2.0 * g.h) continue;
    const double q = ratio(i, d);
    ++rep.nodes;
    if (q < rep.lower) {
      rep.lower = q;
      rep.argmin = x;
    }
    if (q > rep.upper) {
      rep.upper = q;
      rep.argmax = x;
    }
  }
  if (rep.nodes == 0) throw PreconditionError("window unresolved: no nodes at distance >= 2h");
  return rep;
}

}  // namespace

RatioReport boundary_decay(const ScalarField& u, const Domain& domain, const Vec2& w, double r, double c_tilde) {
  if (!(c_tilde >= 1.0)) throw PreconditionError("c_tilde must be at least 1");
  return scan_window(u, domain, w, r / c_tilde, [&](std::size_t i, double d) { return u[i] * r / d; });
}

BoundaryHarnackReport boundary_harnack(const ScalarField& u, const ScalarField& v, const Domain& domain,
                                       const Vec2& w, double r, double c_tilde) {
  require_same_grid(u, v);
  if (!(c_tilde >= 1.0)) throw PreconditionError("c_tilde must be at least 1");
  BoundaryHarnackReport rep;
  rep.ratio = scan_window(u, domain, w, r / c_tilde, [&](std::size_t i, double) {
    if (!(v[i] > 0.0)) throw PreconditionError("v must be positive in the window");
    return u[i] / v[i];
  });
  rep.four_point = rep.ratio.upper / rep.ratio.lower;
  return rep;
}

DecayFit harnack_to_boundary(const ScalarField& u, const Domain& domain, const Vec2& w, double r_prime, int levels) {
  const Vec2 a = corkscrew(domain, w, r_prime);
  const Vec2 nrm = (a - w) / r_prime;
  const CellLocator loc(u.grid);
  const double ua = evaluate(u, loc, a);
  std::vector<double> dists, vals;
  for (int k = 1; k <= levels; ++k) {
    const double t = r_prime / std::ldexp(1.0, k);
    if (t < 2.0 * u.grid->h) break;
    const double val = evaluate(u, loc, w + t * nrm);
    if (!(val > 0.0)) break;
    dists.push_back(t);
    vals.push_back(val);
  }
  if (dists.size() < 2) throw PreconditionError("fewer than 2 resolvable points on the normal");
  return fit_decay(dists, vals, r_prime, ua + r_prime);
}

}  // namespace pxharm
