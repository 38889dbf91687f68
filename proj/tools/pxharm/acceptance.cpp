#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "pxharm/barriers.hpp"
#include "pxharm/estimates.hpp"
#include "pxharm/geometry.hpp"
#include "pxharm/grid.hpp"
#include "pxharm/measure.hpp"
#include "pxharm/modular.hpp"
#include "pxharm/solver.hpp"

namespace pxharm::cli {

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream note;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " FAILED(" << what << ")";
    }
  }
};

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double drift(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const Box kUnitBox{Vec2(-1.0, -1.0), Vec2(1.0, 1.0)};

void c1_linear(Verdict& v) {
  const auto grid = build_grid(Domain::square(1.0), 1.0 / 32);
  const auto s = solve_dirichlet(grid, ExponentField::constant(2.0), [](const Vec2& x) { return x.x(); });
  double err = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) err = std::max(err, std::abs(s.u[i] - grid->nodes[i].x()));
  v.note << "max nodal error " << g(err);
  v.expect(err <= 1e-10, "error <= 1e-10");
}

void c2_harmonic(Verdict& v) {
  const auto f = [](const Vec2& x) { return x.x() * x.x() - x.y() * x.y(); };
  double e[2];
  int k = 0;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const auto grid = build_grid(Domain::square(1.0), h);
    const auto s = solve_dirichlet(grid, ExponentField::constant(2.0), f);
    e[k++] = l2_error(s.u, f) / l2_norm(grid, f);
  }
  const double ratio = e[0] / e[1];
  v.note << "relative L2 error " << g(e[1]) << " at h=1/64, ratio " << g(ratio);
  v.expect(e[1] <= 1e-3, "error <= 1e-3");
  v.expect(ratio >= 3.4 && ratio <= 4.6, "ratio in [3.4, 4.6]");
}

void c3_radial(Verdict& v) {
  const auto grid = build_grid(Domain::annulus(0.25, 1.0), 1.0 / 64);
  const auto f = [](const Vec2& x) { return std::pow(x.norm(), 2.0 / 3.0); };
  const auto s = solve_dirichlet(grid, ExponentField::constant(4.0), f);
  double err = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i)
    if (grid->node_kind[i] == NodeKind::Interior) err = std::max(err, std::abs(s.u[i] - f(grid->nodes[i])) / f(grid->nodes[i]));
  v.note << "max interior relative error " << g(err) << ", converged " << s.report.converged;
  v.expect(err <= 0.02, "error <= 2%");
  v.expect(s.report.converged, "converged");
}

void c4_barriers(Verdict& v) {
  const std::vector<ExponentField> ps{ExponentField::constant(2.0, kUnitBox), ExponentField::constant(3.0, kUnitBox),
                                      ExponentField::affine(2.0, Vec2(0.5, 0.0), kUnitBox)};
  int runs = 0, fails = 0;
  double worst_bnd = 0.0;
  for (const auto& p : ps) {
    for (auto fam : {BarrierFamily::WolanskiSuper, BarrierFamily::WolanskiSub, BarrierFamily::BaumanSuper,
                     BarrierFamily::BaumanSub}) {
      BarrierSpec spec;
      spec.family = fam;
      if (is_wolanski(fam)) {
        spec.radius = std::min(0.1, wolanski_r_star(p));
        spec.mu = wolanski_mu_star(p, 1.0, spec.radius);
      } else {
        spec.mu = bauman_mu_default(p);
        spec.radius = std::min(0.1, bauman_r_star(p, 1.0, 2, spec.mu));
      }
      const auto rep = certify(spec, p);
      ++runs;
      worst_bnd = std::max(worst_bnd, rep.boundary_error);
      if (!rep.passed || rep.samples < 10000) {
        ++fails;
        v.note << " [" << p.describe() << " " << to_string(fam) << " worst " << g(rep.worst_sign) << "]";
      }
    }
  }
  v.note << runs << " certifications, " << fails << " failed, max boundary error " << g(worst_bnd);
  v.expect(fails == 0, "all certifications pass");
}

void c5_formulas(Verdict& v) {
  const double mu = bauman_mu_star(3.0, 2.0);
  const double rs = wolanski_r_star(ExponentField::affine(2.0, Vec2(1.0, 0.0), Box{Vec2(0, 0), Vec2(1, 1)}));
  v.expect(mu == 2.0, "bauman_mu_star(3,2) == 2");
  v.expect(rs == 0.25, "wolanski_r_star == 1/4");
  int bad = 0;
  for (double n : {3.0, 4.0, 5.0, 7.0}) {
    for (double p = 2.1; p < n; p += 0.35) {
      const auto d = doubling_exponents(n, p, p);
      if (d.alpha != 0.0) ++bad;
      if (std::abs(d.beta - (n - 1.0) / (p - 1.0)) > 1e-12) ++bad;
    }
  }
  const auto d43 = doubling_exponents(4.0, 3.0, 3.0);
  v.expect(std::abs(d43.beta - 1.5) <= 1e-12, "beta(4,3,3) = 3/2");
  v.note << "mu* " << mu << ", r* " << rs << ", formula mismatches " << bad;
  v.expect(bad == 0, "alpha = 0 and beta = (n-1)/(p-1)");
}

void c6_quasihyperbolic(Verdict& v) {
  const Domain slab = Domain::slab(2.0);
  double worst = 0.0, asym = 0.0;
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.1, 0.1 * std::numbers::e}, {0.05, 0.4}, {0.2, 0.6}, {0.3, 0.9}}) {
    const Vec2 x(0.0, a), y(0.0, b);
    const double step = a / 10.0;
    const double k = quasihyperbolic_distance(slab, x, y, step);
    const double kb = quasihyperbolic_distance(slab, y, x, step);
    worst = std::max(worst, drift(k, std::log(b / a)));
    asym = std::max(asym, std::abs(k - kb));
  }
  v.note << "max relative error " << g(worst) << ", max asymmetry " << g(asym);
  v.expect(worst <= 0.05, "within 5%");
  v.expect(asym <= 1e-9, "symmetric");
}

void c7_chains(Verdict& v) {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int violations = 0, total = 0, maxN = 0;
  for (const Domain& d : {Domain::slab(2.0), Domain::disk(1.0)}) {
    const double M = d.regularity().M_uniform;
    for (int k = 0; k < 100; ++k) {
      Vec2 w;
      double r;
      if (d.kind() == Domain::Kind::Slab) {
        w = Vec2(2.0 * U(rng) - 1.0, 0.0);
        r = 1.0;
      } else {
        const double th = 2.0 * std::numbers::pi * U(rng);
        w = Vec2(std::cos(th), std::sin(th));
        r = 0.8;
      }
      auto pick = [&] {
        for (;;) {
          const double s = 2.0 * U(rng) - 1.0, t = 2.0 * U(rng) - 1.0;
          const Vec2 z = w + (r / M) * Vec2(s, t);
          if ((z - w).norm() < r / M && d.signed_dist(z) > 0.02) return z;
        }
      };
      const auto chain = harnack_chain(d, w, r, pick(), pick());
      ++total;
      maxN = std::max(maxN, chain.count);
      if (!chain.within_bound() || !chain.consecutive_intersect) ++violations;
    }
  }
  v.note << total << " chains, max N " << maxN << ", violations " << violations;
  v.expect(violations == 0, "zero violations");
}

void c8_comparison(Verdict& v) {
  const ExponentField p = ExponentField::affine(2.0, Vec2(0.5, 0.0), kUnitBox);
  const auto grid = build_grid(Domain::disk(0.95), 1.0 / 24);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SolveOptions opts;
  opts.tol = 1e-11;
  double worst = std::numeric_limits<double>::infinity();
  int violations = 0;
  for (int k = 0; k < 50; ++k) {
    const double a1 = U(rng), a2 = U(rng), f1 = 1.0 + 2.0 * std::abs(U(rng)), f2 = 1.0 + 2.0 * std::abs(U(rng));
    const double ph = U(rng), b0 = 0.01 + 0.2 * std::abs(U(rng)), b1 = 0.2 * U(rng), b2 = 0.2 * U(rng);
    const auto g2 = [=](const Vec2& x) { return a1 * std::sin(f1 * x.x() + ph) + a2 * std::cos(f2 * x.y()) + x.x() * x.y(); };
    const auto g1 = [=](const Vec2& x) {
      return g2(x) + b0 * (1.0 + std::sin(3.0 * x.x() + b1) * std::cos(2.0 * x.y() + b2));
    };
    const auto u1 = solve_dirichlet(grid, p, g1, opts);
    const auto u2 = solve_dirichlet(grid, p, g2, opts);
    const auto rep = check_comparison(u1.u, u2.u, 1e-8);
    worst = std::min(worst, rep.min_difference);
    if (rep.violated || !u1.report.converged || !u2.report.converged) ++violations;
  }
  v.note << "50 pairs, min(u1-u2) " << g(worst) << ", violations " << violations;
  v.expect(violations == 0, "min(u1-u2) >= -1e-8");
}

void c9_measure(Verdict& v) {
  const Domain slab = Domain::slab(2.0);
  const double r = 0.41, h = 0.0025;
  const Vec2 w = Vec2::Zero();
  const auto grid = build_covering_grid(slab, Box{w - Vec2(2 * r, 2 * r), w + Vec2(2 * r, 2 * r)}, h);
  double worst = 0.0, min_atom = 0.0, identity = 0.0, dbl = 0.0;
  for (auto [a, pv] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {1.0, 3.0}, {2.0, 3.0}}) {
    const ExponentField p = ExponentField::constant(pv);
    const auto u = ScalarField::sample(grid, [a = a](const Vec2& x) { return a * std::max(0.0, x.y()); });
    const auto mu = riesz_measure(u, p, w, r);
    for (double s : {0.1, 0.2, 0.4}) worst = std::max(worst, drift(mu.mass(s), std::pow(a, pv - 1.0) * 2.0 * s));
    min_atom = std::min(min_atom, mu.min_atom());
    if (pv == 2.0) dbl = mu.mass(0.4) / mu.mass(0.2);
    const auto psi = ScalarField::sample(grid, [&](const Vec2& x) {
      const double t = 1.0 - (x - w).squaredNorm() / (0.9 * r * 0.9 * r);
      return t > 0.0 ? t * t * (1.0 + 0.5 * x.x()) : 0.0;
    });
    const auto id = riesz_identity(mu, u, p, psi);
    identity = std::max(identity, std::abs(id.measure_side - id.residual_side));
  }
  v.note << "max mass error " << g(worst) << ", doubling " << g(dbl) << ", identity gap " << g(identity)
         << ", min atom " << g(min_atom);
  v.expect(worst <= 0.02, "mass within 2%");
  v.expect(std::abs(dbl - 2.0) <= 0.1, "doubling 2 +- 5%");
  v.expect(identity <= 1e-10, "identity 1e-10");
  v.expect(min_atom >= -1e-10, "atoms >= -1e-10");
}

struct DiskRun {
  double d1_lo, d1_hi, d2_lo, d2_hi, bh_lo, bh_hi, carleson;
};

DiskRun disk_run(double h) {
  const Domain disk = Domain::disk(1.0);
  const ExponentField p = ExponentField::affine(2.0, Vec2(0.3, 0.0));
  const Vec2 w(0.0, -1.0);
  const auto grid = build_grid(disk, h);
  const auto u1 = solve_dirichlet(grid, p, [](const Vec2& x) { return std::max(0.0, x.y() + 0.5); });
  const auto u2 = solve_dirichlet(grid, p, [](const Vec2& x) { return std::max(0.0, x.y() + 0.5) * (2.0 + x.x()); });
  const auto b1 = boundary_decay(u1.u, disk, w, 0.5, 6.0);
  const auto b2 = boundary_decay(u2.u, disk, w, 0.5, 6.0);
  const auto bh = boundary_harnack(u1.u, u2.u, disk, w, 0.5, 6.0);
  const auto c = carleson_check(u1.u, disk, w, 0.5, 2.0);
  return {b1.lower, b1.upper, b2.lower, b2.upper, bh.ratio.lower, bh.ratio.upper, c.ratio};
}

const DiskRun& disk_runs(int which) {
  static const DiskRun coarse = disk_run(1.0 / 48), fine = disk_run(1.0 / 96);
  return which == 0 ? coarse : fine;
}

void c10_boundary(Verdict& v) {
  const DiskRun& a = disk_runs(0);
  const DiskRun& b = disk_runs(1);
  const double dr = std::max({drift(a.d1_lo, b.d1_lo), drift(a.d1_hi, b.d1_hi), drift(a.d2_lo, b.d2_lo),
                              drift(a.d2_hi, b.d2_hi), drift(a.bh_lo, b.bh_lo), drift(a.bh_hi, b.bh_hi)});
  v.expect(b.d1_lo > 0.0 && b.d2_lo > 0.0 && std::isfinite(b.d1_hi) && std::isfinite(b.d2_hi), "0 < lower, upper < inf");
  v.expect(dr <= 0.2, "drift <= 20%");
  const auto grid = build_grid(Domain::slab(2.0), 0.01);
  const auto u = ScalarField::sample(grid, [](const Vec2& x) { return x.y(); });
  const auto fit = oscillation_decay(u, Vec2::Zero(), 0.5, 5);
  v.note << "decay [" << g(b.d1_lo) << ", " << g(b.d1_hi) << "], harnack [" << g(b.bh_lo) << ", " << g(b.bh_hi)
         << "], max drift " << g(dr) << "; beta " << g(fit.exponent) << ", envelope " << g(fit.envelope_constant);
  v.expect(std::abs(fit.exponent - 1.0) <= 0.02, "beta = 1 +- 0.02");
  v.expect(fit.envelope_constant <= 1.05, "envelope <= 1.05");
}

void c11_carleson(Verdict& v) {
  const Domain slab = Domain::slab(2.0);
  const auto grid = build_grid(slab, 0.01);
  const auto u = ScalarField::sample(grid, [](const Vec2& x) { return x.y(); });
  const double ratio = carleson_check(u, slab, Vec2::Zero(), 0.2, 2.0).ratio;
  const double dr = drift(disk_runs(0).carleson, disk_runs(1).carleson);
  v.note << "half-plane ratio " << g(ratio) << ", disk ratio " << g(disk_runs(1).carleson) << " (drift " << g(dr) << ")";
  v.expect(std::abs(ratio - 0.5) <= 0.01, "ratio 1/2 +- 2%");
  v.expect(dr <= 0.2, "disk drift <= 20%");
}

void c12_capacity(Verdict& v) {
  const double r = 0.5;
  const ExponentField p2 = ExponentField::constant(2.0);
  const double cap = relative_capacity(CapacitySet::ClosedBall, Vec2::Zero(), r, p2, r / 32).capacity;
  const double exact = 2.0 * std::numbers::pi / std::log(2.0);
  int violations = 0;
  const std::vector<double> fr{0.25, 0.4, 0.55, 0.7, 0.85, 1.0, 1.3, 1.6};
  std::vector<Domain> ifaces;
  for (double f : fr) ifaces.push_back(Domain::disk(f * r));
  const auto grid = build_grid(Domain::disk(2.0 * r), r / 24, ifaces);
  for (const ExponentField& p : {p2, ExponentField::affine(2.5, Vec2(0.2, 0.1))}) {
    double prev = 0.0;
    for (std::size_t k = 0; k < fr.size(); ++k) {
      std::vector<char> mask(grid->size(), 0);
      for (std::size_t i = 0; i < grid->size(); ++i)
        mask[i] = grid->nodes[i].norm() <= fr[k] * r * (1 + 1e-12) || grid->on_interface[k][i];
      const double c = relative_capacity_on_grid(grid, mask, p).capacity;
      if (c < prev) ++violations;
      prev = c;
    }
  }
  v.note << "capacity " << g(cap) << " vs " << g(exact) << " (error " << g(drift(cap, exact)) << "), monotonicity violations "
         << violations;
  v.expect(drift(cap, exact) <= 0.05, "within 5%");
  v.expect(violations == 0, "monotone");
}

void c13_modular(Verdict& v) {
  const auto grid = build_grid(Domain::square(1.0), 1.0 / 16);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int violations = 0;
  double worst_const = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double p0 = 2.0 + 0.3 * U(rng), s1 = 0.1 * U(rng), s2 = 0.1 * U(rng);
    const ExponentField p = ExponentField::affine(p0, Vec2(s1, s2));
    const double scale = std::pow(10.0, 2.0 * U(rng));
    const double c1 = U(rng), c2 = U(rng), c3 = U(rng);
    auto u = ScalarField::sample(grid, [&](const Vec2& x) {
      return scale * (c1 * std::sin(3.0 * x.x()) + c2 * std::cos(5.0 * x.y()) + c3 * x.x() * x.y());
    });
    const double rho = modular(u, p);
    const double nrm = luxemburg_norm(u, p);
    auto unit = u;
    unit.values /= nrm;
    const double rho1 = modular(unit, p);
    if (std::abs(rho1 - 1.0) > 1e-9) ++violations;
    if ((nrm <= 1.0) != (rho <= 1.0) && std::abs(rho - 1.0) > 1e-9) ++violations;
    const auto br = norm_modular_bracket(rho, p);
    if (nrm < br.lower * (1 - 1e-9) || nrm > br.upper * (1 + 1e-9)) ++violations;
    const double q = 1.0 + 3.0 * (U(rng) + 1.0) / 2.0 + 0.05;
    const ExponentField pc = ExponentField::constant(q);
    double lp = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) lp += grid->quad_weights[i] * std::pow(std::abs(u[i]), q);
    lp = std::pow(lp, 1.0 / q);
    const double err = drift(luxemburg_norm(u, pc), lp);
    worst_const = std::max(worst_const, err);
    if (err > 1e-10) ++violations;
  }
  v.note << "100 fields, violations " << violations << ", constant-p norm error " << g(worst_const);
  v.expect(violations == 0, "zero violations");
}

struct Criterion {
  int id;
  const char* title;
  double limit;
  void (*fn)(Verdict&);
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "solver linear exactness", 1.0, c1_linear},
      {2, "solver harmonic polynomial", 30.0, c2_harmonic},
      {3, "constant-p radial oracle", 60.0, c3_radial},
      {4, "barrier certification", 10.0, c4_barriers},
      {5, "threshold and doubling formulas", 0.0, c5_formulas},
      {6, "quasihyperbolic oracle", 0.0, c6_quasihyperbolic},
      {7, "Harnack chain bound", 0.0, c7_chains},
      {8, "comparison principle", 0.0, c8_comparison},
      {9, "Riesz measure oracle", 0.0, c9_measure},
      {10, "boundary decay / boundary Harnack stability", 0.0, c10_boundary},
      {11, "Carleson check", 0.0, c11_carleson},
      {12, "capacity oracle", 0.0, c12_capacity},
      {13, "modular/norm suite", 0.0, c13_modular},
  };
  return list;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result,
                                            const std::vector<int>& only) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    r.limit_seconds = c.limit;
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(v);
    } catch (const std::exception& e) {
      v.ok = false;
      v.note << " exception: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit > 0.0 && r.seconds >= c.limit) {
      v.ok = false;
      v.note << " FAILED(runtime limit " << c.limit << " s)";
    }
    r.passed = v.ok;
    r.detail = v.note.str();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s %2d  ", r.passed ? "PASS" : "FAIL", r.id);
  std::string s = buf + r.title + ": " + r.detail;
  std::snprintf(buf, sizeof buf, " [%.2f s", r.seconds);
  s += buf;
  if (r.limit_seconds > 0.0) {
    std::snprintf(buf, sizeof buf, " < %.0f s", r.limit_seconds);
    s += buf;
  }
  return s + "]";
}

nlohmann::ordered_json to_json(const std::vector<CriterionResult>& results) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& r : results)
    a.push_back({{"id", r.id},
                 {"title", r.title},
                 {"passed", r.passed},
                 {"detail", r.detail},
                 {"seconds", r.seconds},
                 {"limit_seconds", r.limit_seconds}});
  return a;
}

}  // namespace pxharm::cli
