#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "pxharm/geometry.hpp"
#include "pxharm/types.hpp"

namespace pxharm {

enum class NodeKind : std::uint8_t { Interior, Boundary, Exterior };

/// First-order triangulation of a domain (or of a box/ball covering it).
///
/// Built from a structured lattice whose triangles are cut along the zero
/// level set of the domain's signed distance, so boundary nodes lie exactly on
/// the boundary. `dist` is the signed distance to the domain boundary (zero on
/// boundary nodes); `on_hull` marks nodes on the outer edge of the mesh.
/// Interior nodes are the unknowns of Dirichlet problems; all others are pinned.
struct Grid {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> cells;
  std::vector<NodeKind> node_kind;
  std::vector<double> quad_weights;
  std::vector<double> dist;
  std::vector<char> on_hull;
  /// One flag vector per extra interface passed to the builder.
  std::vector<std::vector<char>> on_interface;
  double h = 0.0;

  std::vector<double> cell_area;
  std::vector<std::array<Vec2, 3>> cell_grad;  ///< gradients of the three hat functions

  std::size_t size() const { return nodes.size(); }
  Vec2 centroid(std::size_t c) const {
    const auto& t = cells[c];
    return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
  }
  double total_weight() const;
  std::size_t count(NodeKind kind) const;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Body-fitted grid of the domain (truncated to its mesh box). Requires
/// h <= feature_size / 4.
GridPtr build_grid(const Domain& domain, double h);

/// Grid of `region` whose triangles are additionally cut along each of the
/// `interfaces`' boundaries; `on_interface[k]` flags nodes on interface k.
GridPtr build_grid(const Domain& region, double h, const std::vector<Domain>& interfaces);

/// Grid of a box with the domain boundary resolved inside it. Nodes outside
/// the domain are Exterior; the box edge nodes inside are Boundary.
GridPtr build_covering_grid(const Domain& domain, const Box& box, double h);

/// Nodal values on a grid.
struct ScalarField {
  GridPtr grid;
  Eigen::VectorXd values;

  static ScalarField zeros(GridPtr grid);
  static ScalarField sample(GridPtr grid, const std::function<double(const Vec2&)>& fn);

  Vec2 cell_gradient(std::size_t c) const;
  double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
};

/// Throws PreconditionError unless both fields live on the same grid.
void require_same_grid(const ScalarField& a, const ScalarField& b);

/// ||u - exact||_{L^2} over the mesh using a degree-5 triangle rule on the
/// piecewise-linear interpolant of the nodal values.
double l2_error(const ScalarField& u, const std::function<double(const Vec2&)>& exact);
double l2_norm(const GridPtr& grid, const std::function<double(const Vec2&)>& fn);

/// Bucketed cell lookup for evaluating fields at arbitrary points.
class CellLocator {
 public:
  explicit CellLocator(GridPtr grid);
  /// Cell containing x and its barycentric coordinates; cell = -1 when outside the mesh.
  struct Hit {
    long cell = -1;
    Eigen::Vector3d bary = Eigen::Vector3d::Zero();
  };
  Hit locate(const Vec2& x) const;
  const GridPtr& grid() const { return grid_; }

 private:
  GridPtr grid_;
  Vec2 lo_ = Vec2::Zero();
  double step_ = 1.0;
  long nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> buckets_;
};

/// Value of the piecewise-linear interpolant at x. Throws outside the mesh.
double evaluate(const ScalarField& u, const CellLocator& locator, const Vec2& x);

/// Min and max of the piecewise-linear interpolant over the closed ball B(c, r)
/// intersected with the mesh (exact for linear pieces).
struct BallExtrema {
  double min = 0.0;
  double max = 0.0;
  bool empty = true;
};
BallExtrema ball_extrema(const ScalarField& u, const Vec2& c, double r);

void write_field_csv(std::ostream& out, const ScalarField& u);
void write_grid_nodes_csv(std::ostream& out, const Grid& grid);
void write_grid_cells_csv(std::ostream& out, const Grid& grid);

}  // namespace pxharm
