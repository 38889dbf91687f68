#include "pxharm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace pxharm {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

double grid_diameter(const Grid& g) {
  if (g.nodes.empty()) return 1.0;
  Vec2 lo = g.nodes[0], hi = g.nodes[0];
  for (const auto& x : g.nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  return std::max((hi - lo).norm(), 1e-300);
}

// The discrete energy with per-cell exponent p_T and weight c_T, regularized by eps.
class EnergyModel {
 public:
  EnergyModel(const Grid& grid, const ExponentField& p, double eps, bool capacity_form)
      : grid_(grid), eps2_(eps * eps) {
    const std::size_t nc = grid.cells.size();
    p_.resize(nc);
    c_.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      p_[c] = p.eval(grid.centroid(c));
      c_[c] = (capacity_form ? 1.0 : 1.0 / p_[c]) * grid.cell_area[c];
    }
  }

  Vec2 cell_grad(const Eigen::VectorXd& u, std::size_t c) const {
    const auto& t = grid_.cells[c];
    const auto& G = grid_.cell_grad[c];
    return u[t[0]] * G[0] + u[t[1]] * G[1] + u[t[2]] * G[2];
  }

  double energy(const Eigen::VectorXd& u) const {
    double e = 0.0;
    for (std::size_t c = 0; c < grid_.cells.size(); ++c) {
      const double s = cell_grad(u, c).squaredNorm() + eps2_;
      e += c_[c] * std::pow(s, 0.5 * p_[c]);
    }
    return e;
  }

  // Nodal gradient of the energy (all nodes).
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(u.size());
    for (std::size_t c = 0; c < grid_.cells.size(); ++c) {
      const Vec2 g = cell_grad(u, c);
      const double s = g.squaredNorm() + eps2_;
      const Vec2 flux = c_[c] * p_[c] * std::pow(s, 0.5 * p_[c] - 1.0) * g;
      const auto& t = grid_.cells[c];
      for (int a = 0; a < 3; ++a) r[t[a]] += flux.dot(grid_.cell_grad[c][a]);
    }
    return r;
  }

  // Hessian (newton) or lagged-coefficient stiffness (picard) on the free unknowns.
  void matrix(const Eigen::VectorXd& u, const std::vector<int>& index, bool newton,
              std::vector<Triplet>& trip) const {
    trip.clear();
    for (std::size_t c = 0; c < grid_.cells.size(); ++c) {
      const Vec2 g = cell_grad(u, c);
      const double s = g.squaredNorm() + eps2_;
      const double pc = p_[c];
      const double w = c_[c] * pc * std::pow(s, 0.5 * pc - 1.0);
      Mat2 H = w * Mat2::Identity();
      if (newton) H += c_[c] * pc * (pc - 2.0) * std::pow(s, 0.5 * pc - 2.0) * (g * g.transpose());
      const auto& t = grid_.cells[c];
      for (int a = 0; a < 3; ++a) {
        const int ia = index[t[a]];
        if (ia < 0) continue;
        const Vec2 Ha = H * grid_.cell_grad[c][a];
        for (int b = 0; b < 3; ++b) {
          const int ib = index[t[b]];
          if (ib < 0) continue;
          trip.emplace_back(ia, ib, Ha.dot(grid_.cell_grad[c][b]));
        }
      }
    }
  }

 private:
  const Grid& grid_;
  double eps2_;
  std::vector<double> p_;
  std::vector<double> c_;
};

double max_free(const Eigen::VectorXd& r, const std::vector<int>& index) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (index[i] >= 0) m = std::max(m, std::abs(r[i]));
  return m;
}

// Harmonic extension of the pinned values: one linear solve with unit weights.
void harmonic_start(const Grid& grid, const std::vector<int>& index, int nfree, Eigen::VectorXd& u) {
  std::vector<Triplet> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    const auto& t = grid.cells[c];
    const double A = grid.cell_area[c];
    for (int a = 0; a < 3; ++a) {
      const int ia = index[t[a]];
      if (ia < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const double k = A * grid.cell_grad[c][a].dot(grid.cell_grad[c][b]);
        const int ib = index[t[b]];
        if (ib < 0) {
          rhs[ia] -= k * u[t[b]];
        } else {
          trip.emplace_back(ia, ib, k);
        }
      }
    }
  }
  SpMat K(nfree, nfree);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw NumericalError("stiffness factorization failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (index[i] >= 0) u[i] = x[index[i]];
}

}  // namespace

Solution minimize_energy(const ScalarField& start, const std::vector<char>& pinned, const ExponentField& p,
                         const SolveOptions& opts, bool capacity_form) {
  const Grid& grid = *start.grid;
  const std::size_t n = grid.size();
  if (pinned.size() != n) throw PreconditionError("pinned mask does not match the grid");

  std::vector<int> index(n, -1);
  int nfree = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    if (pinned[i]) {
      lo = std::min(lo, start[i]);
      hi = std::max(hi, start[i]);
    } else {
      index[i] = nfree++;
    }
  }
  const double osc = std::isfinite(hi - lo) ? hi - lo : 0.0;

  Solution sol{start, {}};
  SolveReport& rep = sol.report;
  rep.epsilon = opts.epsilon > 0.0 ? opts.epsilon : 1e-8 * grid_diameter(grid);
  rep.tol = opts.tol > 0.0 ? opts.tol : std::max(1e-8 * osc, 1e-14);
  rep.method = opts.method == SolveMethod::Picard ? "picard" : "damped-newton";

  Eigen::VectorXd& u = sol.u.values;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    if (!std::isfinite(u[i])) throw PreconditionError("non-finite start or boundary value");
  if (opts.initial) {
    if (opts.initial->size() != u.size()) throw PreconditionError("initial guess does not match the grid");
    for (std::size_t i = 0; i < n; ++i)
      if (!pinned[i]) u[i] = (*opts.initial)[i];
  } else if (nfree > 0) {
    harmonic_start(grid, index, nfree, u);
  }

  const EnergyModel model(grid, p, rep.epsilon, capacity_form);
  double E = model.energy(u);
  Eigen::VectorXd grad = model.gradient(u);
  rep.residual_norm = max_free(grad, index);
  rep.energy_history.push_back(E);

  std::vector<Triplet> trip;
  SpMat H(nfree, nfree);
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;
  Eigen::VectorXd g_free(nfree), d(n), trial(n);

  // 0: newton, 1: picard, 2: scaled steepest descent
  auto direction = [&](int kind) -> bool {
    for (std::size_t i = 0; i < n; ++i)
      if (index[i] >= 0) g_free[index[i]] = grad[i];
    d.setZero();
    if (kind == 2) {
      for (std::size_t i = 0; i < n; ++i)
        if (index[i] >= 0) d[i] = -grad[i] / std::max(grid.quad_weights[i], 1e-300);
      return true;
    }
    model.matrix(u, index, kind == 0, trip);
    H.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed) {
      ldlt.analyzePattern(H);
      analyzed = true;
    }
    ldlt.factorize(H);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd x = ldlt.solve(-g_free);
    if (!x.allFinite()) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (index[i] >= 0) d[i] = x[index[i]];
    return true;
  };

  // Armijo backtracking; near the optimum the energy change drowns in rounding,
  // so a step that keeps E within rounding and lowers the residual is accepted too.
  auto line_search = [&]() -> bool {
    const double slope = grad.dot(d);
    if (!(slope < 0.0)) return false;
    const double round = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(E), 1e-300);
    double t = 1.0;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      trial = u + t * d;
      const double Et = model.energy(trial);
      if (!std::isfinite(Et)) continue;
      if (Et <= E + 1e-4 * t * slope) {
        u.swap(trial);
        E = Et;
        grad = model.gradient(u);
        return true;
      }
      if (Et <= E + round) {
        Eigen::VectorXd gt = model.gradient(trial);
        if (max_free(gt, index) < rep.residual_norm) {
          u.swap(trial);
          E = std::min(E, Et);
          grad.swap(gt);
          return true;
        }
      }
    }
    return false;
  };

  const int first = opts.method == SolveMethod::Picard ? 1 : 0;
  while (nfree > 0 && rep.residual_norm > rep.tol && rep.iterations < opts.max_iter) {
    bool moved = false;
    for (int kind = first; kind <= 2 && !moved; ++kind) moved = direction(kind) && line_search();
    if (!moved) break;
    ++rep.iterations;
    rep.residual_norm = max_free(grad, index);
    rep.energy_history.push_back(E);
  }
  rep.converged = rep.residual_norm <= rep.tol;

  double e0 = 0.0;
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    const double pc = p.eval(grid.centroid(c));
    e0 += (capacity_form ? 1.0 : 1.0 / pc) * std::pow(sol.u.cell_gradient(c).norm(), pc) * grid.cell_area[c];
  }
  rep.energy = e0;
  return sol;
}

Solution solve_dirichlet(const GridPtr& grid, const ExponentField& p, const BoundaryData& g,
                         const SolveOptions& opts) {
  if (!grid) throw PreconditionError("null grid");
  ScalarField start = ScalarField::zeros(grid);
  std::vector<char> pinned(grid->size(), 0);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    switch (grid->node_kind[i]) {
      case NodeKind::Interior:
        break;
      case NodeKind::Boundary:
        pinned[i] = 1;
        start.values[static_cast<Eigen::Index>(i)] = g(grid->nodes[i]);
        break;
      case NodeKind::Exterior:
        pinned[i] = 1;
        break;
    }
  }
  return minimize_energy(start, pinned, p, opts, false);
}

double dirichlet_energy(const ScalarField& u, const ExponentField& p) {
  const Grid& g = *u.grid;
  double e = 0.0;
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const double pc = p.eval(g.centroid(c));
    e += std::pow(u.cell_gradient(c).norm(), pc) / pc * g.cell_area[c];
  }
  return e;
}

namespace {

Vec2 flux(const Vec2& grad, double p) {
  const double m = grad.norm();
  if (m == 0.0) return Vec2::Zero();
  return std::pow(m, p - 2.0) * grad;
}

}  // namespace

Eigen::VectorXd weak_residual_vector(const ScalarField& u, const ExponentField& p) {
  const Grid& g = *u.grid;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const Vec2 f = flux(u.cell_gradient(c), p.eval(g.centroid(c))) * g.cell_area[c];
    const auto& t = g.cells[c];
    for (int a = 0; a < 3; ++a) r[t[a]] += f.dot(g.cell_grad[c][a]);
  }
  return r;
}

double weak_residual(const ScalarField& u, const ExponentField& p, const ScalarField& phi) {
  require_same_grid(u, phi);
  const Grid& g = *u.grid;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.on_hull[i] && phi[i] != 0.0) throw PreconditionError("test function must vanish on the boundary");
  double s = 0.0;
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const Vec2 f = flux(u.cell_gradient(c), p.eval(g.centroid(c)));
    s += f.dot(phi.cell_gradient(c)) * g.cell_area[c];
  }
  return s;
}

ScalarField hat(const GridPtr& grid, std::size_t node) {
  if (node >= grid->size()) throw PreconditionError("node index out of range");
  ScalarField f = ScalarField::zeros(grid);
  f.values[static_cast<Eigen::Index>(node)] = 1.0;
  return f;
}

Jet jet_from_hessian(double value, const Vec2& grad, const Mat2& hessian) {
  return Jet{value, grad, hessian.trace(), grad.dot(hessian * grad)};
}

double normalized_operator(const Jet& jet, double p_value, const Vec2& grad_p) {
  const double m = jet.grad.norm();
  if (!(m > 0.0)) throw PreconditionError("vanishing gradient: normalized operator undefined");
  return grad_p.dot(jet.grad) * std::log(m) + (p_value - 2.0) * jet.inf_laplacian / (m * m) + jet.laplacian;
}

double strong_operator(const std::function<Jet(const Vec2&)>& f, const ExponentField& p, const Vec2& x) {
  return normalized_operator(f(x), p.eval(x), p.grad(x));
}

ComparisonReport check_comparison(const ScalarField& u, const ScalarField& v, double tol_cmp) {
  require_same_grid(u, v);
  ComparisonReport rep;
  rep.tol = tol_cmp;
  rep.min_difference = std::numeric_limits<double>::infinity();
  const Grid& g = *u.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.node_kind[i] != NodeKind::Interior) continue;
    const double d = u[i] - v[i];
    if (d < rep.min_difference) {
      rep.min_difference = d;
      rep.location = g.nodes[i];
    }
  }
  if (!std::isfinite(rep.min_difference)) rep.min_difference = 0.0;
  rep.violated = rep.min_difference < -tol_cmp;
  return rep;
}

CapacityResult relative_capacity_on_grid(const GridPtr& grid, const std::vector<char>& in_set,
                                         const ExponentField& p, const SolveOptions& opts) {
  const std::size_t n = grid->size();
  if (in_set.size() != n) throw PreconditionError("set mask does not match the grid");
  CapacityResult res;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_set[i]) continue;
    ++res.set_nodes;
    if (grid->on_hull[i]) {
      res.capacity = std::numeric_limits<double>::infinity();
      return res;
    }
  }
  if (res.set_nodes < 4) throw PreconditionError("condenser set not resolved by at least 4 nodes");
  ScalarField start = ScalarField::zeros(grid);
  std::vector<char> pinned(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (in_set[i]) start.values[static_cast<Eigen::Index>(i)] = 1.0;
    pinned[i] = in_set[i] || grid->on_hull[i];
  }
  Solution sol = minimize_energy(start, pinned, p, opts, true);
  res.capacity = sol.report.energy;
  res.report = std::move(sol.report);
  return res;
}

namespace {

std::vector<char> ball_mask(const Grid& g, const Vec2& c, double r, int iface) {
  std::vector<char> m(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    m[i] = (g.nodes[i] - c).norm() <= r * (1.0 + 1e-12) || (iface >= 0 && g.on_interface[iface][i]);
  return m;
}

void restrict_to_complement(const Grid& g, const Domain& domain, int iface, double r, std::vector<char>& m) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (m[i]) m[i] = g.on_interface[iface][i] || domain.signed_dist(g.nodes[i]) <= 1e-12 * r;
}

}  // namespace

CapacityResult relative_capacity(CapacitySet set, const Vec2& center, double r, const ExponentField& p, double h,
                                 const Domain* domain, const SolveOptions& opts) {
  if (!(r > 0.0)) throw PreconditionError("radius must be positive");
  std::vector<Domain> ifaces{Domain::disk(r, center)};
  if (set == CapacitySet::ComplementInBall) {
    if (!domain) throw PreconditionError("complement set needs a domain");
    ifaces.push_back(*domain);
  }
  const GridPtr grid = build_grid(Domain::disk(2.0 * r, center), h, ifaces);
  std::vector<char> mask = ball_mask(*grid, center, r, 0);
  if (set == CapacitySet::ComplementInBall) restrict_to_complement(*grid, *domain, 1, r, mask);
  return relative_capacity_on_grid(grid, mask, p, opts);
}

FatnessReport fatness_ratio(const Domain& domain, const ExponentField& p, const Vec2& x, double r, double h,
                            const SolveOptions& opts) {
  if (domain.signed_dist(x) > 0.0) throw PreconditionError("fatness point must lie outside the domain");
  if (r > domain.regularity().r_nta * (1.0 + 1e-12)) throw PreconditionError("radius exceeds the NTA scale");
  const GridPtr grid = build_grid(Domain::disk(2.0 * r, x), h, {Domain::disk(r, x), domain});
  const std::vector<char> ball = ball_mask(*grid, x, r, 0);
  std::vector<char> comp = ball;
  restrict_to_complement(*grid, domain, 1, r, comp);
  FatnessReport rep;
  rep.ball_capacity = relative_capacity_on_grid(grid, ball, p, opts).capacity;
  rep.complement_capacity = relative_capacity_on_grid(grid, comp, p, opts).capacity;
  rep.ratio = rep.complement_capacity / rep.ball_capacity;
  return rep;
}

}  // namespace pxharm
