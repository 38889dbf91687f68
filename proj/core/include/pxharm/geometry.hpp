#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pxharm/types.hpp"

namespace pxharm {

/// Ball-condition radii and NTA/uniform constants of a domain.
struct DomainRegularity {
  double r_interior = 0.0;
  double r_exterior = 0.0;
  double r_ball = 0.0;
  double M_uniform = 1.0;
  double r_nta = 0.0;
  bool M_empirical = false;  ///< M_uniform came from sampling rather than a closed form.
};

/// A planar domain with exact signed distance (positive inside).
///
/// Built-ins: disk, annulus (centered at the origin), the horizontal slab
/// 0 < x2 < height, the square [0, L]^2 and an L-shape (-L, L)^2 \ [0, L)^2
/// whose six corners are rounded with radius rho_c.
class Domain {
 public:
  enum class Kind { Disk, Annulus, Slab, Square, LShape };

  static Domain disk(double radius, const Vec2& center = Vec2::Zero());
  static Domain annulus(double inner, double outer);
  /// The slab is unbounded in x1; `half_width` only truncates it for meshing.
  static Domain slab(double height, double half_width = -1.0);
  static Domain square(double side);
  static Domain l_shape(double size, double corner_radius = -1.0);

  Kind kind() const { return kind_; }
  double signed_dist(const Vec2& x) const;
  Vec2 boundary_proj(const Vec2& x) const;
  /// Unit inward normal at the boundary point nearest to x.
  Vec2 inward_normal(const Vec2& x) const;
  bool contains(const Vec2& x) const { return signed_dist(x) > 0.0; }

  /// Region that grids of this domain cover (the slab is truncated here).
  Box mesh_box() const;
  /// Length scale that caps admissible grid steps (h <= feature_size / 4).
  double feature_size() const;
  double area() const;
  const DomainRegularity& regularity() const { return regularity_; }
  std::string describe() const;

  /// Radius/center accessors used by closed-form checks.
  double radius() const { return a_; }
  double outer_radius() const { return b_; }
  const Vec2& center() const { return center_; }
  double height() const { return a_; }

  /// Replaces the uniform constant with a sampled estimate; used for domains
  /// without a closed-form value.
  void set_uniform_constant(double M, bool empirical);

 private:
  struct Piece {
    bool arc = false;
    Vec2 a, b;          // segment endpoints (segments)
    Vec2 c;             // arc center
    double radius = 0;  // arc radius
    double theta0 = 0;  // arc start angle
    double sweep = 0;   // signed sweep (positive: counter-clockwise)
  };
  struct Closest {
    Vec2 point;
    Vec2 outward;
    double dist;
  };
  Closest closest_on_curve(const Vec2& x) const;

  Kind kind_ = Kind::Disk;
  double a_ = 1.0, b_ = 0.0, c_ = 0.0;
  Vec2 center_ = Vec2::Zero();
  std::vector<Piece> pieces_;
  DomainRegularity regularity_;
};

/// Builds a domain by name: "disk" {R}, "annulus" {R1, R2}, "slab"/"half-plane-slab"
/// {height[, half_width]}, "square" {L}, "l-shape"/"smoothed-L-shape" {L[, rho_c]}.
Domain make_domain(const std::string& kind, const std::vector<double>& params);
/// Parses compact specs such as "disk:1", "annulus:0.25,1", "slab:2".
Domain parse_domain(const std::string& spec);

/// Samples the uniform-domain definition over random pairs with a family of
/// inward-pushed polygonal curves; the result is an upper estimate of M_Omega.
double estimate_uniform_constant(const Domain& domain, int pairs, std::uint64_t seed);

/// Corkscrew point A_r(w) = w + r * inward normal, with d(A, boundary) = r.
Vec2 corkscrew(const Domain& domain, const Vec2& w, double r);

struct QuasihyperbolicPath {
  double length = 0.0;       ///< discrete quasihyperbolic distance
  std::vector<Vec2> points;  ///< polyline from x to y
  std::size_t explored = 0;  ///< lattice nodes settled by the search
};

/// Quasihyperbolic distance by Dijkstra on an 8-connected lattice of step
/// `grid_step` anchored at the origin. Edge weights integrate 1/d along the
/// edge with d interpolated linearly between endpoints (logarithmic mean).
QuasihyperbolicPath quasihyperbolic_path(const Domain& domain, const Vec2& x, const Vec2& y,
                                         double grid_step);
double quasihyperbolic_distance(const Domain& domain, const Vec2& x, const Vec2& y, double grid_step);

struct ChainBall {
  Vec2 center;
  double radius;
};

struct HarnackChain {
  std::vector<ChainBall> balls;
  int count = 0;
  double quasihyperbolic = 0.0;  ///< discrete k(x, y) along which the chain was built
  double bound = 0.0;            ///< 9 M^2 + 3 M log(d(y)/d(x))
  double M = 1.0;                ///< uniform constant used (also plays the role of M')
  bool consecutive_intersect = true;
  bool doubled_inside_window = true;  ///< every 2B_i lies in B(w, 4r) and in the domain
  bool within_bound() const { return count <= bound; }
};

/// Chain of balls B(c, d(c)/2) along a discrete quasihyperbolic geodesic from
/// the point nearer the boundary to the other one. Requires x, y in B(w, r/M).
HarnackChain harnack_chain(const Domain& domain, const Vec2& w, double r, const Vec2& x, const Vec2& y,
                           double grid_step = 0.0);

}  // namespace pxharm
