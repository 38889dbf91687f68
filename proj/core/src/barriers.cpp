#include "pxharm/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pxharm {

std::string to_string(BarrierFamily family) {
  switch (family) {
    case BarrierFamily::WolanskiSuper: return "wolanski-super";
    case BarrierFamily::WolanskiSub: return "wolanski-sub";
    case BarrierFamily::BaumanSuper: return "bauman-super";
    case BarrierFamily::BaumanSub: return "bauman-sub";
  }
  return "?";
}

BarrierFamily parse_barrier_family(const std::string& name) {
  for (auto f : {BarrierFamily::WolanskiSuper, BarrierFamily::WolanskiSub, BarrierFamily::BaumanSuper,
                 BarrierFamily::BaumanSub})
    if (to_string(f) == name) return f;
  throw PreconditionError("unknown barrier family: " + name);
}

bool is_super(BarrierFamily f) { return f == BarrierFamily::WolanskiSuper || f == BarrierFamily::BaumanSuper; }
bool is_wolanski(BarrierFamily f) { return f == BarrierFamily::WolanskiSuper || f == BarrierFamily::WolanskiSub; }

namespace {

void check_spec(const BarrierSpec& s) {
  if (!(s.radius > 0.0)) throw PreconditionError("barrier radius must be positive");
  if (!(s.height > 0.0)) throw PreconditionError("barrier height must be positive");
  if (!(s.mu > 0.0)) throw PreconditionError("barrier mu must be positive");
}

// Super-barrier jet; the sub-barrier is M minus it.
Jet super_jet(const BarrierSpec& s, const Vec2& x, int n) {
  const double r = s.radius, mu = s.mu;
  const Vec2 z = x - s.center;
  const double rho2 = z.squaredNorm();
  Jet j;
  if (is_wolanski(s.family)) {
    const double A = s.height / (std::exp(-mu) - std::exp(-4.0 * mu));
    const double e = std::exp(-mu * rho2 / (r * r));
    const double k = 2.0 * A * mu / (r * r) * e;
    const double t = 2.0 * mu * rho2 / (r * r);
    j.value = A * (std::exp(-mu) - e);
    j.grad = k * z;
    j.laplacian = k * (n - t);
    j.inf_laplacian = k * k * k * rho2 * (1.0 - t);
  } else {
    const double A = s.height / (1.0 - std::pow(2.0, -mu));
    const double rho = std::sqrt(rho2);
    const double q = std::pow(r / rho, mu);
    const double k = A * mu * q / rho2;  // |grad| / rho
    j.value = A * (1.0 - q);
    j.grad = k * z;
    j.laplacian = k * (n - mu - 2.0);
    j.inf_laplacian = k * k * k * rho2 * (1.0 - mu - 2.0);
  }
  return j;
}

}  // namespace

Jet eval(const BarrierSpec& spec, const Vec2& x, int n) {
  check_spec(spec);
  const double rho = (x - spec.center).norm();
  const double tol = 1e-12 * spec.radius;
  if (rho < spec.radius - tol || rho > 2.0 * spec.radius + tol)
    throw PreconditionError("point outside the barrier annulus");
  Jet j = super_jet(spec, x, n);
  if (!is_super(spec.family)) {
    j.value = spec.height - j.value;
    j.grad = -j.grad;
    j.laplacian = -j.laplacian;
    j.inf_laplacian = -j.inf_laplacian;
  }
  return j;
}

double wolanski_r_star(const ExponentField& p) {
  const double L = p.lip_const();
  if (L <= 0.0) return 0.25;
  return std::min((p.p_minus() - 1.0) / (4.0 * L), 0.25);
}

double wolanski_condition(const ExponentField& p, double M, double r, double mu, int n) {
  const double L = p.lip_const();
  return 2.0 * r * L *
             (std::log(4.0 / (1.0 - std::exp(-3.0 * mu))) + std::abs(std::log(M)) + std::abs(std::log(r)) +
              4.0 * mu) -
         2.0 * mu * (p.p_minus() - 1.0) + n + p.p_plus() - 2.0;
}

double wolanski_mu_star(const ExponentField& p, double M, double r, int n) {
  if (!(M > 0.0) || !(r > 0.0)) throw PreconditionError("M and r must be positive");
  if (r > wolanski_r_star(p) * (1.0 + 1e-12)) throw PreconditionError("annulus too large for barrier");
  auto F = [&](double mu) { return wolanski_condition(p, M, r, mu, n); };
  double lo = 1.0;
  if (F(lo) <= 0.0) return lo;
  // The mu coefficient 8 r L - 2 (p- - 1) vanishes at r = r0, so no mu works there.
  if (8.0 * r * p.lip_const() - 2.0 * (p.p_minus() - 1.0) >= 0.0)
    throw NumericalError("no admissible mu: the mu term cancels at r = r0, take r < r0");
  double hi = 2.0;
  while (F(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("no admissible mu found");
  }
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) <= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

double bauman_mu_star(double n, double p_minus) {
  if (!(p_minus > 1.0)) throw PreconditionError("need p- > 1");
  return (n - p_minus + 1.0) / (p_minus - 1.0);
}

double bauman_mu_star(const ExponentField& p, int n) { return bauman_mu_star(n, p.p_minus()); }

double bauman_mu_default(const ExponentField& p, int n) { return std::max(bauman_mu_star(p, n), 1.0); }

double bauman_r_double_star(double M, double mu) { return M * mu / (2.0 * (std::pow(2.0, mu) - 1.0)); }

double bauman_r_star(const ExponentField& p, double M, int n, double mu) {
  if (mu <= 0.0) mu = bauman_mu_default(p, n);
  const double rss = bauman_r_double_star(M, mu);
  double r = std::min(rss, 0.25);
  const double L = p.lip_const();
  if (L <= 0.0) return r;
  const double lg = std::abs(std::log(std::pow(2.0, mu + 1.0) * rss));
  if (lg > 0.0) r = std::min(r, (1.0 - 1e-12) / (4.0 * L * lg));
  // r |log r| is increasing on (0, 1/e], which contains (0, 1/4].
  const double cap = 1.0 / (2.0 * L);
  auto ok = [&](double s) { return s * std::abs(std::log(s)) < cap; };
  if (!ok(r)) {
    double lo = 0.0, hi = r;
    for (int k = 0; k < 200 && hi - lo > 1e-15 * r; ++k) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? lo : hi) = mid;
    }
    r = lo;
  }
  return r;
}

double wolanski_log_envelope(double M, double r, double mu) {
  return std::log(4.0 / (1.0 - std::exp(-3.0 * mu))) + std::abs(std::log(M)) + std::abs(std::log(r)) +
         std::log(mu) + 3.0 * mu;
}

CertificationReport certify(const BarrierSpec& spec, const ExponentField& p, int n, const CertifyOptions& opts) {
  check_spec(spec);
  CertificationReport rep;
  rep.family = spec.family;
  rep.mu = spec.mu;
  rep.r = spec.radius;
  rep.M = spec.height;
  rep.n = n;
  rep.forced = opts.force;

  const double r = spec.radius, M = spec.height, mu = spec.mu, L = p.lip_const();
  bool admissible = true;
  if (is_wolanski(spec.family)) {
    rep.r_star = wolanski_r_star(p);
    if (r > rep.r_star * (1.0 + 1e-12)) {
      admissible = false;
      rep.mu_star = std::numeric_limits<double>::quiet_NaN();
    } else {
      rep.mu_star = wolanski_mu_star(p, M, r, n);
    }
    rep.slack = wolanski_condition(p, M, r, mu, n);
    rep.log_envelope = wolanski_log_envelope(M, r, mu);
  } else {
    rep.mu_star = bauman_mu_star(p, n);
    rep.r_star = bauman_r_star(p, M, n, mu);
    const double A = M / (1.0 - std::pow(2.0, -mu));
    const double gmax = A * mu / r, gmin = gmax / std::pow(2.0, mu + 1.0);
    const double lg = std::max(std::abs(std::log(gmax)), std::abs(std::log(gmin)));
    rep.slack = 2.0 * r * L * lg - mu * (p.p_minus() - 1.0) + n - p.p_minus();
    rep.log_envelope = std::numeric_limits<double>::quiet_NaN();
  }
  if (admissible && (mu < rep.mu_star - 1e-9 || r > rep.r_star * (1.0 + 1e-12))) admissible = false;
  if (!admissible && !opts.force) throw PreconditionError("outside admissibility region");
  rep.forced = !admissible;

  const Box& box = p.box();
  rep.annulus_in_box = box.contains(spec.center - Vec2(2 * r, 2 * r)) && box.contains(spec.center + Vec2(2 * r, 2 * r));

  const std::size_t samples = std::max<std::size_t>(opts.samples, 4);
  const std::size_t nr = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(std::sqrt(samples / 4.0))));
  const std::size_t na = (samples + nr - 1) / nr;
  const double r0 = r * (1.0 + 1e-6), r1 = 2.0 * r * (1.0 - 1e-6);
  const bool super = is_super(spec.family);
  rep.worst_sign = super ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  auto jet = [&](const Vec2& x) { return eval(spec, x, n); };
  for (std::size_t i = 0; i < nr; ++i) {
    const double rho = r0 + (r1 - r0) * static_cast<double>(i) / static_cast<double>(nr - 1);
    for (std::size_t k = 0; k < na; ++k) {
      const double th = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5 * static_cast<double>(i % 2)) /
                        static_cast<double>(na);
      const Vec2 x = spec.center + rho * Vec2(std::cos(th), std::sin(th));
      const Jet j = jet(x);
      const double v = normalized_operator(j, p.eval(x), p.grad(x));
      if (opts.keep_values) rep.operator_values.push_back(v);
      if (super ? v > rep.worst_sign : v < rep.worst_sign) {
        rep.worst_sign = v;
        rep.worst_point = x;
      }
      rep.max_abs_log_grad = std::max(rep.max_abs_log_grad, std::abs(std::log(j.grad.norm())));
      ++rep.samples;
    }
  }
  if (is_wolanski(spec.family)) rep.log_envelope_ok = rep.max_abs_log_grad <= rep.log_envelope * (1.0 + 1e-12);

  const double hi_target = super ? M : 0.0, lo_target = super ? 0.0 : M;
  for (int k = 0; k < 64; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 64.0;
    const Vec2 dir(std::cos(th), std::sin(th));
    rep.boundary_error = std::max(rep.boundary_error, std::abs(eval(spec, spec.center + 2.0 * r * dir, n).value - hi_target));
    rep.boundary_error = std::max(rep.boundary_error, std::abs(eval(spec, spec.center + r * dir, n).value - lo_target));
  }
  rep.boundary_exact = rep.boundary_error <= 1e-12 * std::max(1.0, M);
  const bool sign_ok = super ? rep.worst_sign <= 1e-8 : rep.worst_sign >= -1e-8;
  rep.passed = sign_ok && rep.boundary_exact;
  return rep;
}

}  // namespace pxharm
