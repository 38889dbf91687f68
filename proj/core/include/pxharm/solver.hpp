#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pxharm/exponent.hpp"
#include "pxharm/grid.hpp"

namespace pxharm {

using BoundaryData = std::function<double(const Vec2&)>;

enum class SolveMethod { Picard, DampedNewton };

struct SolveOptions {
  /// Gradient regularization (|grad u|^2 + eps^2)^{1/2}; <= 0 picks 1e-8 * diam.
  double epsilon = -1.0;
  /// Target for the max nodal weak residual; <= 0 picks 1e-8 * osc(data).
  double tol = -1.0;
  int max_iter = 10000;
  SolveMethod method = SolveMethod::DampedNewton;
  /// Optional starting values for the free nodes (pinned ones are overwritten).
  std::optional<Eigen::VectorXd> initial;
};

struct SolveReport {
  double energy = 0.0;         ///< sum over cells of (1/p) |grad u|^p * area
  double residual_norm = 0.0;  ///< max |weak residual| over interior hat functions
  int iterations = 0;
  bool converged = false;
  double tol = 0.0;
  double epsilon = 0.0;
  std::string method;
  std::vector<double> energy_history;  ///< regularized energy after each iteration
};

struct Solution {
  ScalarField u;
  SolveReport report;
};

/// Minimizes the discrete variable-exponent Dirichlet energy with u = g on
/// Boundary nodes and u = 0 on Exterior nodes. Never throws on
/// non-convergence; the report says so instead.
Solution solve_dirichlet(const GridPtr& grid, const ExponentField& p, const BoundaryData& g,
                         const SolveOptions& opts = {});

/// Lower-level minimizer: nodes with pinned[i] != 0 keep start.values[i].
/// With `capacity_form` the density is |grad u|^p instead of |grad u|^p / p.
Solution minimize_energy(const ScalarField& start, const std::vector<char>& pinned, const ExponentField& p,
                         const SolveOptions& opts, bool capacity_form = false);

/// Unregularized energy sum_T (1/p_T) |grad u|^{p_T} area_T.
double dirichlet_energy(const ScalarField& u, const ExponentField& p);

/// Nodal weak residuals r_i = int |grad u|^{p-2} grad u . grad phi_i for every node.
Eigen::VectorXd weak_residual_vector(const ScalarField& u, const ExponentField& p);

/// int |grad u|^{p-2} grad u . grad phi. phi must vanish on the mesh hull.
/// A value <= 0 for every nonnegative phi certifies a subsolution.
double weak_residual(const ScalarField& u, const ExponentField& p, const ScalarField& phi);

/// Hat function of node i as a field.
ScalarField hat(const GridPtr& grid, std::size_t node);

/// Value, gradient, Laplacian and (unnormalized) infinity-Laplacian
/// sum_ij u_ij u_i u_j of a C^2 function at a point.
struct Jet {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  double laplacian = 0.0;
  double inf_laplacian = 0.0;
};
Jet jet_from_hessian(double value, const Vec2& grad, const Mat2& hessian);

/// <grad p, grad u> log|grad u| + (p - 2) Delta_inf u / |grad u|^2 + Delta u.
/// Its sign is the sign of div(|grad u|^{p-2} grad u). Throws on |grad u| = 0.
double normalized_operator(const Jet& jet, double p_value, const Vec2& grad_p);
double strong_operator(const std::function<Jet(const Vec2&)>& f, const ExponentField& p, const Vec2& x);

struct ComparisonReport {
  double min_difference = 0.0;  ///< min over interior nodes of u - v
  Vec2 location = Vec2::Zero();
  double tol = 1e-8;
  bool violated = false;
};
ComparisonReport check_comparison(const ScalarField& u, const ScalarField& v, double tol_cmp = 1e-8);

/// Condenser sets supported by relative_capacity.
enum class CapacitySet { ClosedBall, ComplementInBall };

struct CapacityResult {
  double capacity = 0.0;
  std::size_t set_nodes = 0;
  SolveReport report;
};

/// Minimum of int |grad u|^{p(x)} over the grid with u = 1 on `in_set`
/// nodes and u = 0 on hull nodes. Infinite when the set touches the hull.
CapacityResult relative_capacity_on_grid(const GridPtr& grid, const std::vector<char>& in_set,
                                         const ExponentField& p, const SolveOptions& opts = {});

/// cap_p(K, B(center, 2r)) with K = closed ball B(center, r) or
/// (R^2 \ domain) intersected with it; the grid step is h.
CapacityResult relative_capacity(CapacitySet set, const Vec2& center, double r, const ExponentField& p, double h,
                                 const Domain* domain = nullptr, const SolveOptions& opts = {});

/// cap(K1, B(x, 2r)) for K1 = complement of domain in closed B(x, r),
/// divided by the capacity of the whole closed ball, both on one grid.
struct FatnessReport {
  double ratio = 0.0;
  double complement_capacity = 0.0;
  double ball_capacity = 0.0;
};
FatnessReport fatness_ratio(const Domain& domain, const ExponentField& p, const Vec2& x, double r, double h,
                            const SolveOptions& opts = {});

}  // namespace pxharm
