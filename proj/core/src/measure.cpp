#include "pxharm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "pxharm/solver.hpp"

namespace pxharm {

double MeasureEstimate::mass(double s) const {
  double m = 0.0;
  const double s2 = s * s * (1.0 + 1e-12);
  for (std::size_t k = 0; k < atoms.size(); ++k)
    if ((points[k] - center).squaredNorm() <= s2) m += atoms[k];
  return m;
}

double MeasureEstimate::mass_between(double s1, double s2) const {
  double m = 0.0;
  const double a = s1 * s1 * (1.0 + 1e-12), b = s2 * s2 * (1.0 + 1e-12);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double d = (points[k] - center).squaredNorm();
    if (d > a && d <= b) m += atoms[k];
  }
  return m;
}

double MeasureEstimate::min_atom() const {
  return atoms.empty() ? 0.0 : *std::min_element(atoms.begin(), atoms.end());
}

MeasureEstimate riesz_measure(const ScalarField& u, const ExponentField& p, const Vec2& w, double r) {
  const Grid& g = *u.grid;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.node_kind[i] == NodeKind::Exterior && u[i] != 0.0)
      throw PreconditionError("field is not extended by zero outside the domain");
  const Eigen::VectorXd res = weak_residual_vector(u, p);
  MeasureEstimate mu;
  mu.grid = u.grid;
  mu.center = w;
  mu.radius = r;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.node_kind[i] != NodeKind::Boundary || g.on_hull[i] || g.dist[i] != 0.0) continue;
    if ((g.nodes[i] - w).norm() >= r) continue;
    mu.nodes.push_back(i);
    mu.points.push_back(g.nodes[i]);
    mu.atoms.push_back(-res[static_cast<Eigen::Index>(i)]);
    mu.total += mu.atoms.back();
  }
  return mu;
}

RieszIdentity riesz_identity(const MeasureEstimate& mu, const ScalarField& u, const ExponentField& p,
                             const ScalarField& psi) {
  require_same_grid(u, psi);
  if (mu.grid != u.grid) throw PreconditionError("measure built on another grid");
  RieszIdentity out;
  for (std::size_t k = 0; k < mu.nodes.size(); ++k) out.measure_side -= psi[mu.nodes[k]] * mu.atoms[k];
  out.residual_side = weak_residual(u, p, psi);
  return out;
}

namespace {

double grid_sup(const ScalarField& u, const Vec2& w, double s) { return ball_extrema(u, w, s).max; }

}  // namespace

BoundCheck upper_bound_check(const MeasureEstimate& mu, const ScalarField& u, const ExponentField& p, int n,
                             const Vec2& w, double r_bar) {
  const double pm = p.p_minus(), pp = p.p_plus();
  BoundCheck out;
  const double sup = grid_sup(u, w, 3.0 * r_bar);
  out.hypotheses = {{"p+ < n", pp < n},
                    {"sup_{B(w,3r)} u < 1", sup < 1.0},
                    {"r < 1", r_bar < 1.0},
                    {"window covers r", r_bar <= mu.radius}};
  out.lhs = std::pow(std::max(mu.mass(r_bar), 0.0), pp / (pm * (pm - 1.0)));
  out.rhs = std::pow(r_bar, (n - pp) / (pm - 1.0)) * sup;
  if (!(out.rhs > 0.0)) throw NumericalError("zero right-hand side");
  out.constant = out.lhs / out.rhs;
  return out;
}

BoundCheck lower_bound_check(const MeasureEstimate& mu, const ScalarField& u, const ExponentField& p, int n,
                             const Vec2& w, double r_tilde) {
  const double pm = p.p_minus(), pp = p.p_plus();
  const double q = pp * pp - pm;
  BoundCheck out;
  out.hypotheses = {{"p+ < n", pp < n}, {"p- > 2", pm > 2.0}, {"r_tilde < window", r_tilde < mu.radius}};
  const double m = std::max(mu.mass(mu.radius - 2.0 * u.grid->h), 0.0);
  out.lhs = grid_sup(u, w, r_tilde);
  out.rhs = std::pow(r_tilde, pp * (pm - n) / q) * std::pow(m, pm / q) + r_tilde;
  out.constant = out.lhs / out.rhs;
  out.violation = m == 0.0 && out.lhs > 0.0;
  return out;
}

double Cutoff::value(const Vec2& x) const {
  const double d = (x - center).norm();
  return std::clamp(2.0 - d / r, 0.0, 1.0);
}

Vec2 Cutoff::grad(const Vec2& x) const {
  const Vec2 z = x - center;
  const double d = z.norm();
  if (d <= r || d >= 2.0 * r) return Vec2::Zero();
  return -z / (d * r);
}

CaccioppoliReport caccioppoli_check(const ScalarField& u, const ExponentField& p, const Cutoff& eta) {
  const Grid& g = *u.grid;
  if (!(eta.r > 0.0)) throw PreconditionError("cutoff radius must be positive");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.on_hull[i] && (g.nodes[i] - eta.center).norm() < 2.0 * eta.r * (1.0 - 1e-12))
      throw PreconditionError("cutoff not compactly supported in the grid");
  const double pp = p.p_plus();
  CaccioppoliReport rep;
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const Vec2 x = g.centroid(c);
    const auto& t = g.cells[c];
    const double pc = p.eval(x);
    const double uc = (u[t[0]] + u[t[1]] + u[t[2]]) / 3.0;
    rep.lhs += std::pow(u.cell_gradient(c).norm(), pc) * std::pow(eta.value(x), pp) * g.cell_area[c];
    rep.rhs += std::pow(std::abs(uc), pc) * std::pow(eta.grad(x).norm(), pc) * g.cell_area[c];
  }
  rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : (rep.lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return rep;
}

DoublingExponents doubling_exponents_unchecked(double n, double pm, double pp) {
  const double q = pp * pp - pm;
  if (q == 0.0 || pm == 1.0) throw PreconditionError("degenerate exponent pair");
  DoublingExponents d;
  d.alpha = (pp - pm) * (pp * (n - pp - pm) + n) / ((pm - 1.0) * q);
  d.beta = (q - pp * (pm - n)) / q;
  return d;
}

DoublingExponents doubling_exponents(double n, double pm, double pp) {
  std::string bad;
  if (!(2.0 < pm)) bad += " 2 < p-";
  if (!(pm <= pp)) bad += " p- <= p+";
  if (!(pp < n)) bad += " p+ < n";
  if (!bad.empty()) throw PreconditionError("violated:" + bad);
  return doubling_exponents_unchecked(n, pm, pp);
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

DoublingReport doubling_check(const MeasureEstimate& mu, const ExponentField& p, int n, const Vec2& w, double s) {
  if ((w - mu.center).norm() > 1e-12) throw PreconditionError("measure window centred elsewhere");
  const double pm = p.p_minus(), pp = p.p_plus();
  DoublingReport rep;
  rep.hypotheses = {{"2 < p- <= p+ < n", 2.0 < pm && pm <= pp && pp < n},
                    {"window covers 2s", 2.0 * s < mu.radius}};
  rep.exponents = doubling_exponents_unchecked(n, pm, pp);
  rep.mass_s = mu.mass(s);
  rep.mass_2s = mu.mass(2.0 * s);
  if (rep.mass_s <= 0.0 && rep.mass_2s <= 0.0) {
    rep.empty = true;
    return rep;
  }
  if (rep.mass_s <= 0.0) {
    rep.flagged = true;
    return rep;
  }
  rep.ratio = rep.mass_2s / rep.mass_s;
  const double lhs = std::pow(rep.mass_2s, pp / (pm * (pm - 1.0)));
  const double rhs = std::pow(s, rep.exponents.alpha) *
                     (std::pow(rep.mass_s, pm / (pp * pp - pm)) + std::pow(s, rep.exponents.beta));
  rep.constant = lhs / rhs;
  return rep;
}

void write_measure_csv(std::ostream& out, const MeasureEstimate& mu) {
  out << "x,y,atom\n";
  out.precision(17);
  for (std::size_t k = 0; k < mu.atoms.size(); ++k)
    out << mu.points[k].x() << ',' << mu.points[k].y() << ',' << mu.atoms[k] << '\n';
}

}  // namespace pxharm
