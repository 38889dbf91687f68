#include "pxharm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <limits>

namespace pxharm {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * cross(b - a, c - a); }

struct RawMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;
  std::vector<std::vector<char>> flags;  // one per cut performed so far
  double h = 0.0;
};

RawMesh lattice(const Box& box, double h) {
  RawMesh m;
  m.h = h;
  const int nx = std::max(1, static_cast<int>(std::ceil(box.width() / h - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(box.height() / h - 1e-9)));
  const double hx = box.width() / nx;
  const double hy = box.height() / ny;
  m.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? box.hi.x() : box.lo.x() + i * hx;
      const double y = j == ny ? box.hi.y() : box.lo.y() + j * hy;
      m.nodes.emplace_back(x, y);
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  m.tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return m;
}

// Splits every triangle crossed by the zero set of `domain`'s signed distance.
// Nodes close to the zero set are first projected onto it. Returns the side
// (+1 inside, -1 outside) of each resulting triangle.
std::vector<int> cut(RawMesh& m, const Domain& domain) {
  const std::size_t n0 = m.nodes.size();
  std::vector<char> locked(n0, 0);
  for (const auto& f : m.flags) {
    for (std::size_t i = 0; i < n0; ++i) locked[i] |= f[i];
  }

  // Smallest altitude of the incident triangles bounds how far a node may move.
  std::vector<double> altitude(n0, m.h);
  for (const auto& t : m.tris) {
    const double area2 = 2.0 * std::abs(signed_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]));
    for (int k = 0; k < 3; ++k) {
      const double opposite = (m.nodes[t[(k + 1) % 3]] - m.nodes[t[(k + 2) % 3]]).norm();
      altitude[t[k]] = std::min(altitude[t[k]], area2 / opposite);
    }
  }

  std::vector<double> phi(n0);
  std::vector<char> on_cut(n0, 0);
  for (std::size_t i = 0; i < n0; ++i) {
    phi[i] = domain.signed_dist(m.nodes[i]);
    const double tol = locked[i] ? 1e-12 * m.h : std::min(0.1 * m.h, 0.2 * altitude[i]);
    if (std::abs(phi[i]) < tol) {
      if (!locked[i]) m.nodes[i] = domain.boundary_proj(m.nodes[i]);
      phi[i] = 0.0;
      on_cut[i] = 1;
    }
  }
  auto sign = [&](int i) { return phi[i] > 0.0 ? 1 : (phi[i] < 0.0 ? -1 : 0); };

  std::map<std::pair<int, int>, int> crossings;
  auto crossing = [&](int i, int j) {
    const auto key = std::minmax(i, j);
    if (auto it = crossings.find(key); it != crossings.end()) return it->second;
    Vec2 pos = m.nodes[i], neg = m.nodes[j];
    if (phi[i] < 0.0) std::swap(pos, neg);
    for (int it = 0; it < 80; ++it) {
      const Vec2 mid = 0.5 * (pos + neg);
      const double v = domain.signed_dist(mid);
      if (v == 0.0) {
        pos = neg = mid;
        break;
      }
      (v > 0.0 ? pos : neg) = mid;
    }
    const int id = static_cast<int>(m.nodes.size());
    m.nodes.push_back(0.5 * (pos + neg));
    phi.push_back(0.0);
    on_cut.push_back(1);
    crossings.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 3>> out;
  std::vector<int> side;
  out.reserve(m.tris.size() + m.tris.size() / 8);
  side.reserve(out.capacity());
  const double min_area = 1e-12 * m.h * m.h;
  auto emit = [&](const std::vector<int>& poly, int s) {
    if (poly.size() < 3) return;
    auto push = [&](int a, int b, int c) {
      if (signed_area(m.nodes[a], m.nodes[b], m.nodes[c]) > min_area) {
        out.push_back({a, b, c});
        side.push_back(s);
      }
    };
    if (poly.size() == 3) {
      push(poly[0], poly[1], poly[2]);
      return;
    }
    // convex quadrilateral: take the diagonal with the better worst triangle
    auto quality = [&](int a, int b, int c) {
      const Vec2 &pa = m.nodes[a], &pb = m.nodes[b], &pc = m.nodes[c];
      const double edges = (pb - pa).squaredNorm() + (pc - pb).squaredNorm() + (pa - pc).squaredNorm();
      return signed_area(pa, pb, pc) / edges;
    };
    const double q02 = std::min(quality(poly[0], poly[1], poly[2]), quality(poly[0], poly[2], poly[3]));
    const double q13 = std::min(quality(poly[1], poly[2], poly[3]), quality(poly[1], poly[3], poly[0]));
    if (q02 >= q13) {
      push(poly[0], poly[1], poly[2]);
      push(poly[0], poly[2], poly[3]);
    } else {
      push(poly[1], poly[2], poly[3]);
      push(poly[1], poly[3], poly[0]);
    }
  };

  for (const auto& t : m.tris) {
    int plus = 0, minus = 0;
    for (int v : t) {
      plus += sign(v) > 0;
      minus += sign(v) < 0;
    }
    if (plus == 0 || minus == 0) {
      int s = plus > 0 ? 1 : (minus > 0 ? -1 : 0);
      if (s == 0) {
        const Vec2 c = (m.nodes[t[0]] + m.nodes[t[1]] + m.nodes[t[2]]) / 3.0;
        s = domain.signed_dist(c) >= 0.0 ? 1 : -1;
      }
      emit({t[0], t[1], t[2]}, s);
      continue;
    }
    std::vector<int> pos_poly, neg_poly;
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3];
      if (sign(i) >= 0) pos_poly.push_back(i);
      if (sign(i) <= 0) neg_poly.push_back(i);
      if (sign(i) * sign(j) < 0) {
        const int c = crossing(i, j);
        pos_poly.push_back(c);
        neg_poly.push_back(c);
      }
    }
    emit(pos_poly, 1);
    emit(neg_poly, -1);
  }
  m.tris = std::move(out);
  for (auto& f : m.flags) f.resize(m.nodes.size(), 0);
  m.flags.push_back(std::move(on_cut));
  return side;
}

void keep_side(RawMesh& m, const std::vector<int>& side, int wanted) {
  std::vector<std::array<int, 3>> kept;
  kept.reserve(m.tris.size());
  for (std::size_t t = 0; t < m.tris.size(); ++t) {
    if (side[t] == wanted) kept.push_back(m.tris[t]);
  }
  m.tris = std::move(kept);
}

void compact(RawMesh& m) {
  std::vector<int> remap(m.nodes.size(), -1);
  int next = 0;
  for (const auto& t : m.tris) {
    for (int v : t) {
      if (remap[v] < 0) remap[v] = -2;
    }
  }
  std::vector<Vec2> nodes;
  std::vector<std::vector<char>> flags(m.flags.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    if (remap[i] == -2) {
      remap[i] = next++;
      nodes.push_back(m.nodes[i]);
      for (std::size_t k = 0; k < m.flags.size(); ++k) flags[k].push_back(m.flags[k][i]);
    }
  }
  for (auto& t : m.tris) {
    for (int& v : t) v = remap[v];
  }
  m.nodes = std::move(nodes);
  m.flags = std::move(flags);
}

// Fills the derived arrays of a grid. `domain_flag` marks nodes on the
// boundary of `domain`, whose signed distance populates Grid::dist.
GridPtr finalize(RawMesh&& m, const Domain& domain, std::size_t domain_flag) {
  auto g = std::make_shared<Grid>();
  g->h = m.h;
  g->nodes = std::move(m.nodes);
  g->cells = std::move(m.tris);
  const std::size_t n = g->nodes.size();

  g->cell_area.resize(g->cells.size());
  g->cell_grad.resize(g->cells.size());
  g->quad_weights.assign(n, 0.0);
  std::map<std::pair<int, int>, int> edge_count;
  for (std::size_t c = 0; c < g->cells.size(); ++c) {
    const auto& t = g->cells[c];
    const Vec2 &p0 = g->nodes[t[0]], &p1 = g->nodes[t[1]], &p2 = g->nodes[t[2]];
    const double area = signed_area(p0, p1, p2);
    if (!(area > 0.0)) throw NumericalError("grid construction produced an inverted cell; refine h");
    g->cell_area[c] = area;
    const std::array<Vec2, 3> pts = {p0, p1, p2};
    for (int k = 0; k < 3; ++k) {
      const Vec2 e = pts[(k + 2) % 3] - pts[(k + 1) % 3];
      g->cell_grad[c][k] = Vec2(-e.y(), e.x()) / (2.0 * area);
      g->quad_weights[t[k]] += area / 3.0;
      ++edge_count[std::minmax(t[k], t[(k + 1) % 3])];
    }
  }
  g->on_hull.assign(n, 0);
  for (const auto& [edge, count] : edge_count) {
    if (count == 1) g->on_hull[edge.first] = g->on_hull[edge.second] = 1;
  }
  const auto& on_domain = m.flags[domain_flag];
  g->dist.resize(n);
  g->node_kind.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g->dist[i] = on_domain[i] ? 0.0 : domain.signed_dist(g->nodes[i]);
    if (g->dist[i] < 0.0) {
      g->node_kind[i] = NodeKind::Exterior;
    } else if (on_domain[i] || g->on_hull[i]) {
      g->node_kind[i] = NodeKind::Boundary;
    } else {
      g->node_kind[i] = NodeKind::Interior;
    }
  }
  for (std::size_t k = 0; k < m.flags.size(); ++k) {
    if (k != domain_flag) g->on_interface.push_back(std::move(m.flags[k]));
  }
  return g;
}

void require_resolvable(const Domain& domain, double h) {
  if (!(h > 0.0)) throw PreconditionError("grid step must be positive");
  if (h > domain.feature_size() / 4.0)
    throw PreconditionError("h too coarse for the domain's ball radius (need h <= " +
                            std::to_string(domain.feature_size() / 4.0) + ")");
}

}  // namespace

double Grid::total_weight() const {
  double s = 0.0;
  for (double w : quad_weights) s += w;
  return s;
}

std::size_t Grid::count(NodeKind kind) const {
  return static_cast<std::size_t>(std::count(node_kind.begin(), node_kind.end(), kind));
}

GridPtr build_grid(const Domain& domain, double h) { return build_grid(domain, h, {}); }

GridPtr build_grid(const Domain& region, double h, const std::vector<Domain>& interfaces) {
  require_resolvable(region, h);
  RawMesh m = lattice(region.mesh_box(), h);
  keep_side(m, cut(m, region), 1);
  for (const auto& iface : interfaces) cut(m, iface);
  compact(m);
  return finalize(std::move(m), region, 0);
}

GridPtr build_covering_grid(const Domain& domain, const Box& box, double h) {
  require_resolvable(domain, h);
  RawMesh m = lattice(box, h);
  cut(m, domain);
  compact(m);
  return finalize(std::move(m), domain, 0);
}

ScalarField ScalarField::zeros(GridPtr grid) {
  ScalarField f;
  f.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid->size()));
  f.grid = std::move(grid);
  return f;
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(const Vec2&)>& fn) {
  ScalarField f = zeros(std::move(grid));
  for (std::size_t i = 0; i < f.grid->size(); ++i) f.values[static_cast<Eigen::Index>(i)] = fn(f.grid->nodes[i]);
  return f;
}

Vec2 ScalarField::cell_gradient(std::size_t c) const {
  const auto& t = grid->cells[c];
  const auto& g = grid->cell_grad[c];
  return values[t[0]] * g[0] + values[t[1]] * g[1] + values[t[2]] * g[2];
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid != b.grid) throw PreconditionError("fields live on different grids");
}

namespace {

struct QuadPoint {
  double l0, l1, l2, w;
};

// Symmetric 7-point rule, exact for polynomials of degree 5.
const std::array<QuadPoint, 7>& degree5_rule() {
  static const std::array<QuadPoint, 7> rule = [] {
    const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
    return std::array<QuadPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
                                     {a1, b1, b1, w1},
                                     {b1, a1, b1, w1},
                                     {b1, b1, a1, w1},
                                     {a2, b2, b2, w2},
                                     {b2, a2, b2, w2},
                                     {b2, b2, a2, w2}}};
  }();
  return rule;
}

}  // namespace

double l2_error(const ScalarField& u, const std::function<double(const Vec2&)>& exact) {
  const Grid& g = *u.grid;
  double sum = 0.0;
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    const auto& t = g.cells[c];
    for (const auto& q : degree5_rule()) {
      const Vec2 x = q.l0 * g.nodes[t[0]] + q.l1 * g.nodes[t[1]] + q.l2 * g.nodes[t[2]];
      const double uh = q.l0 * u[t[0]] + q.l1 * u[t[1]] + q.l2 * u[t[2]];
      const double e = uh - exact(x);
      sum += q.w * g.cell_area[c] * e * e;
    }
  }
  return std::sqrt(sum);
}

double l2_norm(const GridPtr& grid, const std::function<double(const Vec2&)>& fn) {
  return l2_error(ScalarField::zeros(grid), [&](const Vec2& x) { return -fn(x); });
}

void write_field_csv(std::ostream& out, const ScalarField& u) {
  out << "x,y,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < u.grid->size(); ++i) {
    out << u.grid->nodes[i].x() << ',' << u.grid->nodes[i].y() << ',' << u[i] << '\n';
  }
}

void write_grid_nodes_csv(std::ostream& out, const Grid& grid) {
  out << "id,x,y,kind,dist\n";
  out.precision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const char* kind = grid.node_kind[i] == NodeKind::Interior ? "interior"
                       : grid.node_kind[i] == NodeKind::Boundary ? "boundary"
                                                                 : "exterior";
    out << i << ',' << grid.nodes[i].x() << ',' << grid.nodes[i].y() << ',' << kind << ',' << grid.dist[i] << '\n';
  }
}

void write_grid_cells_csv(std::ostream& out, const Grid& grid) {
  out << "id,n0,n1,n2\n";
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    out << c << ',' << grid.cells[c][0] << ',' << grid.cells[c][1] << ',' << grid.cells[c][2] << '\n';
  }
}

}  // namespace pxharm

namespace pxharm {

CellLocator::CellLocator(GridPtr grid) : grid_(std::move(grid)) {
  const Grid& g = *grid_;
  if (g.cells.empty()) throw PreconditionError("empty grid");
  Vec2 lo = g.nodes[0], hi = g.nodes[0];
  for (const auto& x : g.nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  step_ = 2.0 * g.h;
  lo_ = lo;
  nx_ = static_cast<long>(std::floor((hi.x() - lo.x()) / step_)) + 1;
  ny_ = static_cast<long>(std::floor((hi.y() - lo.y()) / step_)) + 1;
  buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
  for (std::size_t c = 0; c < g.cells.size(); ++c) {
    Vec2 a = g.nodes[g.cells[c][0]], b = a;
    for (int k = 1; k < 3; ++k) {
      a = a.cwiseMin(g.nodes[g.cells[c][k]]);
      b = b.cwiseMax(g.nodes[g.cells[c][k]]);
    }
    const long i0 = std::clamp(static_cast<long>(std::floor((a.x() - lo_.x()) / step_)), 0L, nx_ - 1);
    const long i1 = std::clamp(static_cast<long>(std::floor((b.x() - lo_.x()) / step_)), 0L, nx_ - 1);
    const long j0 = std::clamp(static_cast<long>(std::floor((a.y() - lo_.y()) / step_)), 0L, ny_ - 1);
    const long j1 = std::clamp(static_cast<long>(std::floor((b.y() - lo_.y()) / step_)), 0L, ny_ - 1);
    for (long j = j0; j <= j1; ++j)
      for (long i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(static_cast<int>(c));
  }
}

CellLocator::Hit CellLocator::locate(const Vec2& x) const {
  Hit best;
  const long i = static_cast<long>(std::floor((x.x() - lo_.x()) / step_));
  const long j = static_cast<long>(std::floor((x.y() - lo_.y()) / step_));
  const double tol = 1e-10;
  double best_min = -std::numeric_limits<double>::infinity();
  for (long jj = j - 1; jj <= j + 1; ++jj) {
    for (long ii = i - 1; ii <= i + 1; ++ii) {
      if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_) continue;
      for (int c : buckets_[static_cast<std::size_t>(jj * nx_ + ii)]) {
        const auto& G = grid_->cell_grad[static_cast<std::size_t>(c)];
        Eigen::Vector3d l;
        for (int k = 0; k < 3; ++k) l[k] = 1.0 / 3.0 + G[k].dot(x - grid_->centroid(static_cast<std::size_t>(c)));
        const double m = l.minCoeff();
        if (m > best_min) {
          best_min = m;
          best.cell = c;
          best.bary = l;
        }
      }
    }
  }
  if (best_min < -tol) best.cell = -1;
  return best;
}

double evaluate(const ScalarField& u, const CellLocator& locator, const Vec2& x) {
  if (u.grid != locator.grid()) throw PreconditionError("locator built for another grid");
  const auto hit = locator.locate(x);
  if (hit.cell < 0) throw PreconditionError("point outside the mesh");
  const auto& t = u.grid->cells[static_cast<std::size_t>(hit.cell)];
  return hit.bary[0] * u[t[0]] + hit.bary[1] * u[t[1]] + hit.bary[2] * u[t[2]];
}

BallExtrema ball_extrema(const ScalarField& u, const Vec2& c, double r) {
  const Grid& g = *u.grid;
  BallExtrema e;
  e.min = std::numeric_limits<double>::infinity();
  e.max = -e.min;
  auto take = [&](double v) {
    e.min = std::min(e.min, v);
    e.max = std::max(e.max, v);
    e.empty = false;
  };
  const double r2 = r * r * (1.0 + 1e-12);
  for (std::size_t k = 0; k < g.cells.size(); ++k) {
    const auto& t = g.cells[k];
    const Vec2 &a = g.nodes[t[0]], &b = g.nodes[t[1]], &d = g.nodes[t[2]];
    const Vec2 ctr = (a + b + d) / 3.0;
    const double reach = std::max({(a - ctr).norm(), (b - ctr).norm(), (d - ctr).norm()});
    if ((ctr - c).norm() > r + reach) continue;
    for (int q = 0; q < 3; ++q)
      if ((g.nodes[t[q]] - c).squaredNorm() <= r2) take(u[t[q]]);
    // edge crossings of the circle
    for (int q = 0; q < 3; ++q) {
      const Vec2& p0 = g.nodes[t[q]];
      const Vec2& p1 = g.nodes[t[(q + 1) % 3]];
      const Vec2 dv = p1 - p0, f = p0 - c;
      const double A = dv.squaredNorm(), B = 2.0 * f.dot(dv), C = f.squaredNorm() - r * r;
      const double disc = B * B - 4.0 * A * C;
      if (disc < 0.0 || A == 0.0) continue;
      for (double s : {(-B - std::sqrt(disc)) / (2.0 * A), (-B + std::sqrt(disc)) / (2.0 * A)})
        if (s > 0.0 && s < 1.0) take((1.0 - s) * u[t[q]] + s * u[t[(q + 1) % 3]]);
    }
    // extreme points of the linear piece on the arc
    const Vec2 grad = u.cell_gradient(k);
    const double gn = grad.norm();
    if (gn > 0.0) {
      for (double sgn : {1.0, -1.0}) {
        const Vec2 x = c + sgn * r * grad / gn;
        Eigen::Vector3d l;
        for (int q = 0; q < 3; ++q) l[q] = 1.0 / 3.0 + g.cell_grad[k][q].dot(x - ctr);
        if (l.minCoeff() >= -1e-12) take(l[0] * u[t[0]] + l[1] * u[t[1]] + l[2] * u[t[2]]);
      }
    }
  }
  if (e.empty) e.min = e.max = 0.0;
  return e;
}

}  // namespace pxharm
