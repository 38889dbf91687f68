#include "pxharm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>

namespace pxharm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 left_normal(const Vec2& d) { return Vec2(-d.y(), d.x()); }

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * std::numbers::pi);
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// Logarithmic mean of two positive distances; integrating 1/d along a segment
// on which d is affine gives length / log_mean(d_a, d_b).
double log_mean(double a, double b) {
  if (std::abs(a - b) <= 1e-12 * std::max(a, b)) return 0.5 * (a + b);
  return (a - b) / (std::log(a) - std::log(b));
}

}  // namespace

Domain Domain::disk(double radius, const Vec2& center) {
  if (!(radius > 0.0)) throw PreconditionError("disk radius must be positive");
  Domain d;
  d.kind_ = Kind::Disk;
  d.a_ = radius;
  d.center_ = center;
  d.regularity_ = {radius, kInf, radius, 2.0, radius, false};
  return d;
}

Domain Domain::annulus(double inner, double outer) {
  if (!(inner > 0.0) || !(outer > inner)) throw PreconditionError("annulus needs 0 < R1 < R2");
  Domain d;
  d.kind_ = Kind::Annulus;
  d.a_ = inner;
  d.b_ = outer;
  const double ri = 0.5 * (outer - inner);
  d.regularity_ = {ri, inner, std::min(ri, inner), 1.0, std::min(ri, inner), true};
  d.regularity_.M_uniform = estimate_uniform_constant(d, 200, 1);
  return d;
}

Domain Domain::slab(double height, double half_width) {
  if (!(height > 0.0)) throw PreconditionError("slab height must be positive");
  Domain d;
  d.kind_ = Kind::Slab;
  d.a_ = height;
  d.c_ = half_width > 0.0 ? half_width : height;
  d.regularity_ = {0.5 * height, kInf, 0.5 * height, 2.0, 0.5 * height, false};
  return d;
}

Domain Domain::square(double side) {
  if (!(side > 0.0)) throw PreconditionError("square side must be positive");
  Domain d;
  d.kind_ = Kind::Square;
  d.a_ = side;
  d.regularity_ = {0.0, kInf, 0.0, 1.0, 0.5 * side, true};
  d.regularity_.M_uniform = estimate_uniform_constant(d, 200, 1);
  return d;
}

Domain Domain::l_shape(double size, double corner_radius) {
  if (!(size > 0.0)) throw PreconditionError("L-shape size must be positive");
  const double rho = corner_radius > 0.0 ? corner_radius : 0.1 * size;
  if (rho > 0.5 * size) throw PreconditionError("L-shape corner radius must not exceed size/2");
  Domain d;
  d.kind_ = Kind::LShape;
  d.a_ = size;
  d.c_ = rho;
  const double L = size;
  // Counter-clockwise polygon (-L,L)^2 minus [0,L)^2; the interior is on the left.
  const std::vector<Vec2> v = {Vec2(-L, -L), Vec2(L, -L), Vec2(L, 0), Vec2(0, 0), Vec2(0, L), Vec2(-L, L)};
  const std::size_t n = v.size();
  std::vector<Vec2> start(n), end(n);  // tangent points before/after each vertex
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 din = (v[i] - v[(i + n - 1) % n]).normalized();
    const Vec2 dout = (v[(i + 1) % n] - v[i]).normalized();
    start[i] = v[i] - rho * din;
    end[i] = v[i] + rho * dout;
    const double turn = din.x() * dout.y() - din.y() * dout.x();  // > 0: convex (left) turn
    Piece arc;
    arc.arc = true;
    arc.radius = rho;
    arc.c = start[i] + (turn > 0.0 ? rho : -rho) * left_normal(din);
    arc.theta0 = std::atan2(start[i].y() - arc.c.y(), start[i].x() - arc.c.x());
    arc.sweep = turn > 0.0 ? 0.5 * std::numbers::pi : -0.5 * std::numbers::pi;
    d.pieces_.push_back(arc);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Piece seg;
    seg.a = end[i];
    seg.b = start[(i + 1) % n];
    d.pieces_.push_back(seg);
  }
  d.regularity_ = {rho, rho, rho, 1.0, rho, true};
  d.regularity_.M_uniform = estimate_uniform_constant(d, 200, 1);
  return d;
}

void Domain::set_uniform_constant(double M, bool empirical) {
  regularity_.M_uniform = M;
  regularity_.M_empirical = empirical;
}

Domain::Closest Domain::closest_on_curve(const Vec2& x) const {
  Closest best{x, Vec2::Zero(), kInf};
  for (const auto& pc : pieces_) {
    Vec2 q, outward;
    if (!pc.arc) {
      const Vec2 ab = pc.b - pc.a;
      const double t = std::clamp((x - pc.a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      q = pc.a + t * ab;
      outward = -left_normal(ab.normalized());
    } else {
      const Vec2 rel = x - pc.c;
      const double phi = std::atan2(rel.y(), rel.x());
      const double offset = pc.sweep > 0.0 ? wrap_angle(phi - pc.theta0) : wrap_angle(pc.theta0 - phi);
      const double span = std::abs(pc.sweep);
      double along;
      if (offset <= span) {
        along = offset;
      } else {
        // outside the arc's angular range: nearest endpoint
        along = (offset - span < 2.0 * std::numbers::pi - offset) ? span : 0.0;
      }
      const double theta = pc.theta0 + (pc.sweep > 0.0 ? along : -along);
      const Vec2 radial(std::cos(theta), std::sin(theta));
      q = pc.c + pc.radius * radial;
      outward = pc.sweep > 0.0 ? radial : Vec2(-radial);
    }
    const double dist = (x - q).norm();
    if (dist < best.dist) best = {q, outward, dist};
  }
  return best;
}

double Domain::signed_dist(const Vec2& x) const {
  switch (kind_) {
    case Kind::Disk:
      return a_ - (x - center_).norm();
    case Kind::Annulus: {
      const double r = x.norm();
      return std::min(r - a_, b_ - r);
    }
    case Kind::Slab:
      return std::min(x.y(), a_ - x.y());
    case Kind::Square: {
      const Vec2 half(0.5 * a_, 0.5 * a_);
      const Vec2 q = (x - half).cwiseAbs() - half;
      const double outside = q.cwiseMax(0.0).norm();
      const double inside = std::min(std::max(q.x(), q.y()), 0.0);
      return -(outside + inside);
    }
    case Kind::LShape: {
      const Closest c = closest_on_curve(x);
      return (x - c.point).dot(c.outward) > 0.0 ? -c.dist : c.dist;
    }
  }
  return 0.0;
}

Vec2 Domain::boundary_proj(const Vec2& x) const {
  switch (kind_) {
    case Kind::Disk: {
      const Vec2 rel = x - center_;
      const double r = rel.norm();
      return r == 0.0 ? Vec2(center_ + Vec2(a_, 0.0)) : Vec2(center_ + a_ / r * rel);
    }
    case Kind::Annulus: {
      const double r = x.norm();
      if (r == 0.0) return Vec2(a_, 0.0);
      return std::abs(r - a_) <= std::abs(b_ - r) ? Vec2(a_ / r * x) : Vec2(b_ / r * x);
    }
    case Kind::Slab:
      return std::abs(x.y()) <= std::abs(a_ - x.y()) ? Vec2(x.x(), 0.0) : Vec2(x.x(), a_);
    case Kind::Square: {
      const Vec2 clamped = x.cwiseMax(0.0).cwiseMin(a_);
      if (clamped != x) return clamped;
      const double dists[4] = {x.x(), a_ - x.x(), x.y(), a_ - x.y()};
      const int k = static_cast<int>(std::min_element(dists, dists + 4) - dists);
      Vec2 q = x;
      if (k == 0) q.x() = 0.0;
      if (k == 1) q.x() = a_;
      if (k == 2) q.y() = 0.0;
      if (k == 3) q.y() = a_;
      return q;
    }
    case Kind::LShape:
      return closest_on_curve(x).point;
  }
  return x;
}

Vec2 Domain::inward_normal(const Vec2& x) const {
  switch (kind_) {
    case Kind::Disk:
      return (center_ - boundary_proj(x)) / a_;
    case Kind::Annulus: {
      const Vec2 p = boundary_proj(x);
      return std::abs(p.norm() - a_) < std::abs(p.norm() - b_) ? Vec2(p / a_) : Vec2(-p / b_);
    }
    case Kind::Slab:
      return std::abs(x.y()) <= std::abs(a_ - x.y()) ? Vec2(0.0, 1.0) : Vec2(0.0, -1.0);
    case Kind::Square: {
      const Vec2 p = boundary_proj(x);
      if (p.x() == 0.0) return Vec2(1.0, 0.0);
      if (p.x() == a_) return Vec2(-1.0, 0.0);
      if (p.y() == 0.0) return Vec2(0.0, 1.0);
      return Vec2(0.0, -1.0);
    }
    case Kind::LShape:
      return -closest_on_curve(x).outward;
  }
  return Vec2::Zero();
}

Box Domain::mesh_box() const {
  switch (kind_) {
    case Kind::Disk:
      return {center_ - Vec2(a_, a_), center_ + Vec2(a_, a_)};
    case Kind::Annulus:
      return {Vec2(-b_, -b_), Vec2(b_, b_)};
    case Kind::Slab:
      return {Vec2(-c_, 0.0), Vec2(c_, a_)};
    case Kind::Square:
      return {Vec2(0.0, 0.0), Vec2(a_, a_)};
    case Kind::LShape:
      return {Vec2(-a_, -a_), Vec2(a_, a_)};
  }
  return {};
}

double Domain::feature_size() const {
  return regularity_.r_ball > 0.0 ? regularity_.r_ball : a_;
}

double Domain::area() const {
  switch (kind_) {
    case Kind::Disk:
      return std::numbers::pi * a_ * a_;
    case Kind::Annulus:
      return std::numbers::pi * (b_ * b_ - a_ * a_);
    case Kind::Slab:
      return 2.0 * c_ * a_;
    case Kind::Square:
      return a_ * a_;
    case Kind::LShape:
      // five convex corners lose rho^2 (1 - pi/4), the reentrant one gains it
      return 3.0 * a_ * a_ - 4.0 * c_ * c_ * (1.0 - std::numbers::pi / 4.0);
  }
  return 0.0;
}

std::string Domain::describe() const {
  std::ostringstream s;
  switch (kind_) {
    case Kind::Disk:
      s << "disk:" << a_;
      if (!center_.isZero(0.0)) s << '@' << center_.x() << ',' << center_.y();
      break;
    case Kind::Annulus:
      s << "annulus:" << a_ << ',' << b_;
      break;
    case Kind::Slab:
      s << "slab:" << a_ << ',' << c_;
      break;
    case Kind::Square:
      s << "square:" << a_;
      break;
    case Kind::LShape:
      s << "l-shape:" << a_ << ',' << c_;
      break;
  }
  return s.str();
}

Domain make_domain(const std::string& kind, const std::vector<double>& params) {
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      throw PreconditionError("domain kind '" + kind + "' got " + std::to_string(params.size()) +
                              " parameters");
  };
  if (kind == "disk") {
    need(1, 3);
    const Vec2 c = params.size() == 3 ? Vec2(params[1], params[2]) : Vec2::Zero();
    return Domain::disk(params[0], c);
  }
  if (kind == "annulus") {
    need(2, 2);
    return Domain::annulus(params[0], params[1]);
  }
  if (kind == "slab" || kind == "half-plane-slab") {
    need(1, 2);
    return Domain::slab(params[0], params.size() == 2 ? params[1] : -1.0);
  }
  if (kind == "square") {
    need(1, 1);
    return Domain::square(params[0]);
  }
  if (kind == "l-shape" || kind == "smoothed-L-shape" || kind == "lshape") {
    need(1, 2);
    return Domain::l_shape(params[0], params.size() == 2 ? params[1] : -1.0);
  }
  throw PreconditionError("unknown domain kind '" + kind + "'");
}

Domain parse_domain(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) params = split_numbers(spec.substr(colon + 1));
  return make_domain(kind, params);
}

double estimate_uniform_constant(const Domain& domain, int pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Box box = domain.mesh_box();
  std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
  std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
  const double margin = 1e-3 * domain.feature_size();
  auto sample = [&] {
    for (;;) {
      const Vec2 z(ux(rng), uy(rng));
      if (domain.signed_dist(z) > margin) return z;
    }
  };

  // Hub points for two-segment detours around holes or reentrant corners.
  std::vector<Vec2> hubs;
  if (domain.kind() == Domain::Kind::LShape) {
    const double L = domain.radius();
    for (double t : {0.1, 0.25, 0.5}) hubs.emplace_back(-t * L, -t * L);
  }

  constexpr int kSamples = 48;
  auto curve_constant = [&](const std::vector<Vec2>& poly, const Vec2& x, const Vec2& y) {
    double length = 0.0;
    double spread = 0.0;
    for (std::size_t s = 0; s + 1 < poly.size(); ++s) {
      length += (poly[s + 1] - poly[s]).norm();
      for (int k = 0; k <= kSamples; ++k) {
        const Vec2 z = poly[s] + (poly[s + 1] - poly[s]) * (static_cast<double>(k) / kSamples);
        const double dz = domain.signed_dist(z);
        if (dz <= 0.0) return kInf;
        spread = std::max(spread, std::min((x - z).norm(), (y - z).norm()) / dz);
      }
    }
    return std::max(length / (x - y).norm(), spread);
  };

  double worst = 1.0;
  for (int i = 0; i < pairs; ++i) {
    const Vec2 x = sample();
    const Vec2 y = sample();
    const double D = (x - y).norm();
    if (D == 0.0) continue;
    double best = kInf;
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double delta = frac * D;
      const Vec2 xs = x + delta * domain.inward_normal(x);
      const Vec2 ys = y + delta * domain.inward_normal(y);
      best = std::min(best, curve_constant({x, xs, ys, y}, x, y));
      for (const auto& hub : hubs) best = std::min(best, curve_constant({x, xs, hub, ys, y}, x, y));
    }
    if (domain.kind() == Domain::Kind::Annulus) {
      // polar interpolation between the two points, going around the hole
      const double rx = x.norm(), ry = y.norm();
      const double ax = std::atan2(x.y(), x.x());
      double dphi = std::atan2(y.y(), y.x()) - ax;
      if (dphi > std::numbers::pi) dphi -= 2.0 * std::numbers::pi;
      if (dphi < -std::numbers::pi) dphi += 2.0 * std::numbers::pi;
      const double mid = 0.5 * (domain.radius() + domain.outer_radius());
      for (double pull : {0.0, 0.5, 1.0}) {
        std::vector<Vec2> poly;
        constexpr int kPieces = 24;
        for (int k = 0; k <= kPieces; ++k) {
          const double t = static_cast<double>(k) / kPieces;
          const double bend = pull * 4.0 * t * (1.0 - t);
          const double rad = (1.0 - bend) * ((1.0 - t) * rx + t * ry) + bend * mid;
          const double ang = ax + t * dphi;
          poly.emplace_back(rad * std::cos(ang), rad * std::sin(ang));
        }
        best = std::min(best, curve_constant(poly, x, y));
      }
    }
    if (std::isfinite(best)) worst = std::max(worst, best);
  }
  return worst;
}

Vec2 corkscrew(const Domain& domain, const Vec2& w, double r) {
  if (std::abs(domain.signed_dist(w)) > 1e-9) throw PreconditionError("corkscrew: w is not on the boundary");
  if (!(r > 0.0) || r > 0.5 * domain.regularity().r_interior)
    throw PreconditionError("no corkscrew at this scale");
  const Vec2 a = w + r * domain.inward_normal(w);
  if (std::abs(domain.signed_dist(a) - r) > 1e-9 || std::abs((a - w).norm() - r) > 1e-9)
    throw NumericalError("corkscrew: inward normal walk did not reach distance r");
  return a;
}

QuasihyperbolicPath quasihyperbolic_path(const Domain& domain, const Vec2& x, const Vec2& y,
                                         double grid_step) {
  const double h = grid_step;
  if (!(h > 0.0)) throw PreconditionError("grid_step must be positive");
  const double dx = domain.signed_dist(x);
  const double dy = domain.signed_dist(y);
  if (dx <= h || dy <= h)
    throw PreconditionError("quasihyperbolic_distance: endpoint outside or within one grid step of the boundary");
  QuasihyperbolicPath out;
  if (x == y) {
    out.points = {x};
    return out;
  }

  // Lattice nodes keep d >= 0.75 h so that every lattice edge stays inside.
  const double node_floor = 0.75 * h;
  constexpr std::size_t kMaxNodes = 40'000'000;
  constexpr std::int64_t kOffset = std::int64_t{1} << 31;

  std::vector<Vec2> pos{x, y};
  std::vector<double> dist_to_bdry{dx, dy};
  std::vector<double> best{0.0, kInf};
  std::vector<std::int64_t> parent{-1, -1};
  std::vector<char> done{0, 0};
  std::unordered_map<std::uint64_t, std::int64_t> index;
  index.reserve(1 << 16);

  auto key = [&](std::int64_t i, std::int64_t j) {
    return (static_cast<std::uint64_t>(i + kOffset) << 32) | static_cast<std::uint64_t>(j + kOffset);
  };
  auto lattice_node = [&](std::int64_t i, std::int64_t j) -> std::int64_t {
    const auto k = key(i, j);
    if (auto it = index.find(k); it != index.end()) return it->second;
    const Vec2 p(static_cast<double>(i) * h, static_cast<double>(j) * h);
    const double d = domain.signed_dist(p);
    const std::int64_t id = d >= node_floor ? static_cast<std::int64_t>(pos.size()) : -1;
    index.emplace(k, id);
    if (id >= 0) {
      if (pos.size() >= kMaxNodes) throw NumericalError("quasihyperbolic_distance: lattice too large");
      pos.push_back(p);
      dist_to_bdry.push_back(d);
      best.push_back(kInf);
      parent.push_back(-1);
      done.push_back(0);
    }
    return id;
  };
  auto segment_inside = [&](const Vec2& a, const Vec2& b) {
    for (int k = 1; k < 8; ++k) {
      if (domain.signed_dist(a + (b - a) * (k / 8.0)) <= 0.0) return false;
    }
    return true;
  };
  auto weight = [&](std::int64_t a, std::int64_t b) {
    return (pos[a] - pos[b]).norm() / log_mean(dist_to_bdry[a], dist_to_bdry[b]);
  };
  // Lattice nodes within 1.5 h of an off-lattice endpoint.
  auto endpoint_links = [&](const Vec2& p) {
    std::vector<std::int64_t> links;
    const auto i0 = static_cast<std::int64_t>(std::floor(p.x() / h)) - 1;
    const auto j0 = static_cast<std::int64_t>(std::floor(p.y() / h)) - 1;
    for (std::int64_t i = i0; i <= i0 + 3; ++i) {
      for (std::int64_t j = j0; j <= j0 + 3; ++j) {
        const Vec2 q(static_cast<double>(i) * h, static_cast<double>(j) * h);
        if ((q - p).norm() > 1.5 * h) continue;
        const auto id = lattice_node(i, j);
        if (id >= 0 && segment_inside(p, q)) links.push_back(id);
      }
    }
    return links;
  };

  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  auto relax = [&](std::int64_t from, std::int64_t to) {
    if (done[to]) return;
    const double cand = best[from] + weight(from, to);
    if (cand < best[to]) {
      best[to] = cand;
      parent[to] = from;
      queue.emplace(cand, to);
    }
  };

  const auto source_links = endpoint_links(x);
  const auto target_links = endpoint_links(y);
  if ((x - y).norm() <= 1.5 * h && segment_inside(x, y)) {
    best[1] = weight(0, 1);
    parent[1] = 0;
    queue.emplace(best[1], 1);
  }
  for (auto id : source_links) relax(0, id);
  done[0] = 1;

  static constexpr int kDi[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  while (!queue.empty()) {
    const auto [dcur, u] = queue.top();
    queue.pop();
    if (done[u] || dcur > best[u]) continue;
    done[u] = 1;
    ++out.explored;
    if (u == 1) break;
    if (std::find(target_links.begin(), target_links.end(), u) != target_links.end()) relax(u, 1);
    const auto i = static_cast<std::int64_t>(std::llround(pos[u].x() / h));
    const auto j = static_cast<std::int64_t>(std::llround(pos[u].y() / h));
    for (int k = 0; k < 8; ++k) {
      const auto v = lattice_node(i + kDi[k], j + kDj[k]);
      if (v >= 0) relax(u, v);
    }
  }
  if (!std::isfinite(best[1])) throw NumericalError("quasihyperbolic_distance: target unreachable on the lattice");
  out.length = best[1];
  for (std::int64_t v = 1; v >= 0; v = parent[v]) out.points.push_back(pos[v]);
  std::reverse(out.points.begin(), out.points.end());
  return out;
}

double quasihyperbolic_distance(const Domain& domain, const Vec2& x, const Vec2& y, double grid_step) {
  return quasihyperbolic_path(domain, x, y, grid_step).length;
}

HarnackChain harnack_chain(const Domain& domain, const Vec2& w, double r, const Vec2& x_in, const Vec2& y_in,
                           double grid_step) {
  const double M = domain.regularity().M_uniform;
  for (const Vec2* p : {&x_in, &y_in}) {
    if ((*p - w).norm() >= r / M || domain.signed_dist(*p) <= 0.0)
      throw PreconditionError("harnack_chain: points must lie in B(w, r/M) and in the domain");
  }
  Vec2 x = x_in, y = y_in;
  if (domain.signed_dist(x) > domain.signed_dist(y)) std::swap(x, y);
  const double dx = domain.signed_dist(x);
  const double dy = domain.signed_dist(y);

  HarnackChain chain;
  chain.M = M;
  chain.bound = 9.0 * M * M + 3.0 * M * std::log(dy / dx);
  auto add_ball = [&](const Vec2& c) {
    const double rad = 0.5 * domain.signed_dist(c);
    if (!chain.balls.empty()) {
      const auto& prev = chain.balls.back();
      if ((prev.center - c).norm() >= prev.radius + rad) chain.consecutive_intersect = false;
    }
    if ((c - w).norm() + 2.0 * rad > 4.0 * r) chain.doubled_inside_window = false;
    chain.balls.push_back({c, rad});
  };

  if (x == y) {
    add_ball(x);
    chain.count = 1;
    return chain;
  }

  const double h = grid_step > 0.0 ? grid_step : std::min(dx, dy) / 4.0;
  const auto path = quasihyperbolic_path(domain, x, y, h);
  chain.quasihyperbolic = path.length;

  // Resample the polyline at spacing h/2.
  std::vector<Vec2> dense{path.points.front()};
  for (std::size_t s = 0; s + 1 < path.points.size(); ++s) {
    const Vec2 a = path.points[s], b = path.points[s + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / (0.5 * h))));
    for (int k = 1; k <= pieces; ++k) dense.push_back(a + (b - a) * (static_cast<double>(k) / pieces));
  }

  constexpr double kOverlap = 0.95;
  std::size_t cur = 0;
  add_ball(x);
  for (;;) {
    const auto& ball = chain.balls.back();
    if ((ball.center - y).norm() < kOverlap * (ball.radius + 0.5 * dy)) {
      if ((ball.center - y).norm() > 0.0) add_ball(y);
      break;
    }
    std::size_t next = cur;
    for (std::size_t j = cur + 1; j < dense.size(); ++j) {
      const double reach = kOverlap * (ball.radius + 0.5 * domain.signed_dist(dense[j]));
      if ((dense[j] - ball.center).norm() >= reach) break;
      next = j;
    }
    if (next == cur) next = std::min(cur + 1, dense.size() - 1);
    cur = next;
    add_ball(dense[cur]);
    if (chain.balls.size() > 100000) throw NumericalError("harnack_chain: chain did not terminate");
  }
  chain.count = static_cast<int>(chain.balls.size());
  return chain;
}

}  // namespace pxharm
