#pragma once

#include <string>
#include <vector>

#include "pxharm/exponent.hpp"
#include "pxharm/geometry.hpp"
#include "pxharm/grid.hpp"

namespace pxharm {

/// Discrete Riesz measure of a zero-extended field: one atom per domain
/// boundary node inside the open window B(w, r).
struct MeasureEstimate {
  GridPtr grid;
  std::vector<std::size_t> nodes;
  std::vector<Vec2> points;
  std::vector<double> atoms;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double total = 0.0;

  /// Sum of atoms in the closed ball B(w, s).
  double mass(double s) const;
  /// Sum of atoms with s1 < |z - w| <= s2.
  double mass_between(double s1, double s2) const;
  double min_atom() const;
};

/// Atoms are minus the nodal weak residuals at boundary nodes. Requires every
/// Exterior node of the (covering) grid to carry the value 0.
MeasureEstimate riesz_measure(const ScalarField& u, const ExponentField& p, const Vec2& w, double r);

/// -sum_z psi(z) atom(z) and the assembled int |grad u|^{p-2} grad u . grad psi;
/// equal whenever psi is supported in the window and u has zero residual elsewhere.
struct RieszIdentity {
  double measure_side = 0.0;
  double residual_side = 0.0;
};
RieszIdentity riesz_identity(const MeasureEstimate& mu, const ScalarField& u, const ExponentField& p,
                             const ScalarField& psi);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;      ///< right side without the constant
  double constant = 0.0; ///< lhs / rhs
  bool violation = false;
  HypothesisStatus hypotheses;
};

/// mu(Δ(w, rb))^{p+/(p-(p- - 1))} against rb^{(n - p+)/(p- - 1)} sup_{B(w,3rb)} u.
BoundCheck upper_bound_check(const MeasureEstimate& mu, const ScalarField& u, const ExponentField& p, int n,
                             const Vec2& w, double r_bar);

/// sup_{B(w,rt)} u against rt^{p+(p- - n)/((p+)^2 - p-)} mu(Δ(w, r))^{p-/((p+)^2 - p-)} + rt,
/// where r is the measure window radius less 2h.
BoundCheck lower_bound_check(const MeasureEstimate& mu, const ScalarField& u, const ExponentField& p, int n,
                             const Vec2& w, double r_tilde);

/// Standard cutoff: 1 on B(center, r), linear to 0 on the sphere of radius 2r.
struct Cutoff {
  Vec2 center = Vec2::Zero();
  double r = 0.0;
  double value(const Vec2& x) const;
  Vec2 grad(const Vec2& x) const;
};

struct CaccioppoliReport {
  double lhs = 0.0;  ///< int |grad u|^p eta^{p+}
  double rhs = 0.0;  ///< int |u|^p |grad eta|^p
  double ratio = 0.0;
};
CaccioppoliReport caccioppoli_check(const ScalarField& u, const ExponentField& p, const Cutoff& eta);

struct DoublingExponents {
  double alpha = 0.0;
  double beta = 0.0;
};
/// Exact formulas; requires 2 < p- <= p+ < n.
DoublingExponents doubling_exponents(double n, double p_minus, double p_plus);
/// Same formulas without the hypothesis check (needs (p+)^2 != p- and p- != 1).
DoublingExponents doubling_exponents_unchecked(double n, double p_minus, double p_plus);

double unit_ball_volume(int n);

struct DoublingReport {
  double mass_s = 0.0;
  double mass_2s = 0.0;
  double ratio = 0.0;     ///< mu(2s) / mu(s)
  double constant = 0.0;  ///< empirical c of the variable-exponent doubling relation
  DoublingExponents exponents;
  bool empty = false;     ///< both masses vanish
  bool flagged = false;   ///< mu(s) = 0 < mu(2s)
  HypothesisStatus hypotheses;
};
DoublingReport doubling_check(const MeasureEstimate& mu, const ExponentField& p, int n, const Vec2& w, double s);

void write_measure_csv(std::ostream& out, const MeasureEstimate& mu);

}  // namespace pxharm
