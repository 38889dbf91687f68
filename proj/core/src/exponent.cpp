#include "pxharm/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace pxharm {

namespace {

std::vector<Vec2> corners(const Box& b) {
  return {b.lo, Vec2(b.hi.x(), b.lo.y()), b.hi, Vec2(b.lo.x(), b.hi.y())};
}

double box_diameter(const Box& b) { return (b.hi - b.lo).norm(); }

// Distance range [min, max] from c to the points of box b.
std::pair<double, double> distance_range(const Box& b, const Vec2& c) {
  const Vec2 nearest(std::clamp(c.x(), b.lo.x(), b.hi.x()), std::clamp(c.y(), b.lo.y(), b.hi.y()));
  double far = 0.0;
  for (const auto& q : corners(b)) far = std::max(far, (q - c).norm());
  return {(nearest - c).norm(), far};
}

std::vector<double> split_numbers(const std::string& s, char sep) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

double ExponentField::eval(const Vec2& x) const {
  switch (kind_) {
    case Kind::Constant:
      return p0_;
    case Kind::Affine:
      return p0_ + slope_.dot(x);
    case Kind::Bump:
      return p0_ + amplitude_ * std::exp(-(x - center_).squaredNorm() / (width_ * width_));
    case Kind::Conjugate: {
      const double q = base_->eval(x);
      return q / (q - 1.0);
    }
  }
  return p0_;
}

Vec2 ExponentField::grad(const Vec2& x) const {
  switch (kind_) {
    case Kind::Constant:
      return Vec2::Zero();
    case Kind::Affine:
      return slope_;
    case Kind::Bump: {
      const Vec2 d = x - center_;
      const double w2 = width_ * width_;
      return -2.0 * amplitude_ / w2 * std::exp(-d.squaredNorm() / w2) * d;
    }
    case Kind::Conjugate: {
      const double q = base_->eval(x);
      return -base_->grad(x) / ((q - 1.0) * (q - 1.0));
    }
  }
  return Vec2::Zero();
}

void ExponentField::finalize() {
  switch (kind_) {
    case Kind::Constant:
      p_minus_ = p_plus_ = p0_;
      lip_const_ = 0.0;
      break;
    case Kind::Affine: {
      p_minus_ = std::numeric_limits<double>::infinity();
      p_plus_ = -p_minus_;
      for (const auto& q : corners(box_)) {
        p_minus_ = std::min(p_minus_, eval(q));
        p_plus_ = std::max(p_plus_, eval(q));
      }
      lip_const_ = slope_.norm();
      break;
    }
    case Kind::Bump: {
      const auto [tmin, tmax] = distance_range(box_, center_);
      const double w2 = width_ * width_;
      const double g_near = std::exp(-tmin * tmin / w2);
      const double g_far = std::exp(-tmax * tmax / w2);
      p_minus_ = p0_ + std::min(amplitude_ * g_near, amplitude_ * g_far);
      p_plus_ = p0_ + std::max(amplitude_ * g_near, amplitude_ * g_far);
      // |grad p| = |a| (2t/w^2) exp(-t^2/w^2) is unimodal in t with peak at w/sqrt(2).
      const double t = std::clamp(width_ / std::numbers::sqrt2, tmin, tmax);
      lip_const_ = std::abs(amplitude_) * 2.0 * t / w2 * std::exp(-t * t / w2);
      break;
    }
    case Kind::Conjugate: {
      const double bm = base_->p_minus();
      const double bp = base_->p_plus();
      p_minus_ = bp / (bp - 1.0);
      p_plus_ = bm / (bm - 1.0);
      lip_const_ = base_->lip_const() / ((bm - 1.0) * (bm - 1.0));
      break;
    }
  }
  // |1/p(x) - 1/p(y)| <= lip/p_minus^2 |x-y| and t log(e + 1/t) increases in t.
  const double diam = box_diameter(box_);
  clog_ = diam > 0.0 ? lip_const_ / (p_minus_ * p_minus_) * diam * std::log(std::numbers::e + 1.0 / diam)
                     : 0.0;
  if (!(p_minus_ > 1.0) || !std::isfinite(p_plus_)) {
    std::ostringstream msg;
    msg << "exponent " << describe() << " violates 1 < p- <= p+ < inf on the reference box (p- = "
        << p_minus_ << ", p+ = " << p_plus_ << ")";
    throw PreconditionError(msg.str());
  }
}

std::string ExponentField::describe() const {
  std::ostringstream s;
  switch (kind_) {
    case Kind::Constant:
      s << "const:" << p0_;
      break;
    case Kind::Affine:
      s << "affine:" << p0_ << ':' << slope_.x() << ',' << slope_.y();
      break;
    case Kind::Bump:
      s << "bump:" << p0_ << ':' << amplitude_ << ':' << center_.x() << ',' << center_.y() << ':' << width_;
      break;
    case Kind::Conjugate:
      s << "conjugate(" << base_->describe() << ')';
      break;
  }
  return s.str();
}

ExponentField ExponentField::conjugate() const {
  ExponentField f;
  f.kind_ = Kind::Conjugate;
  f.base_ = std::make_shared<const ExponentField>(*this);
  f.box_ = box_;
  f.finalize();
  return f;
}

ExponentField ExponentField::on_box(const Box& box) const {
  ExponentField f = *this;
  f.box_ = box;
  if (f.base_) f.base_ = std::make_shared<const ExponentField>(base_->on_box(box));
  f.finalize();
  return f;
}

ExponentField ExponentField::constant(double p, const Box& box) {
  ExponentField f;
  f.kind_ = Kind::Constant;
  f.p0_ = p;
  f.box_ = box;
  f.finalize();
  return f;
}

ExponentField ExponentField::affine(double p0, const Vec2& slope, const Box& box) {
  ExponentField f;
  f.kind_ = slope.isZero(0.0) ? Kind::Constant : Kind::Affine;
  f.p0_ = p0;
  f.slope_ = slope;
  f.box_ = box;
  f.finalize();
  return f;
}

ExponentField ExponentField::bump(double p0, double amplitude, const Vec2& center, double width,
                                  const Box& box) {
  if (!(width > 0.0)) throw PreconditionError("bump exponent needs a positive width");
  ExponentField f;
  f.kind_ = Kind::Bump;
  f.p0_ = p0;
  f.amplitude_ = amplitude;
  f.center_ = center;
  f.width_ = width;
  f.box_ = box;
  f.finalize();
  return f;
}

ExponentField make_exponent(const std::string& kind, const std::vector<double>& params, const Box& box) {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw PreconditionError("exponent kind '" + kind + "' expects " + std::to_string(n) + " parameters");
  };
  if (kind == "constant" || kind == "const") {
    need(1);
    return ExponentField::constant(params[0], box);
  }
  if (kind == "affine") {
    need(3);
    return ExponentField::affine(params[0], Vec2(params[1], params[2]), box);
  }
  if (kind == "bump" || kind == "smooth-bump") {
    need(5);
    return ExponentField::bump(params[0], params[1], Vec2(params[2], params[3]), params[4], box);
  }
  throw PreconditionError("unknown exponent kind '" + kind + "'");
}

ExponentField parse_exponent(const std::string& spec, const Box& box) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), ':', ',');
    params = split_numbers(rest, ',');
  }
  return make_exponent(kind, params, box);
}

double check_log_holder(const ExponentField& p, const std::vector<std::pair<Vec2, Vec2>>& pairs) {
  double worst = 0.0;
  for (const auto& [x, y] : pairs) {
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double jump = std::abs(1.0 / p.eval(x) - 1.0 / p.eval(y));
    worst = std::max(worst, jump * std::log(std::numbers::e + 1.0 / dist));
  }
  return worst;
}

double holder_ball_constant(const ExponentField& p, const Vec2& w, double r, int radial, int angular) {
  if (!(r > 0.0)) throw PreconditionError("holder_ball_constant needs r > 0");
  const double pw = p.eval(w);
  const double log_r = std::abs(std::log(r));
  double worst = 0.0;
  for (int i = 0; i <= radial; ++i) {
    const double rho = r * static_cast<double>(i) / radial;
    for (int j = 0; j < angular; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / angular;
      const Vec2 x = w + rho * Vec2(std::cos(theta), std::sin(theta));
      worst = std::max(worst, std::abs(p.eval(x) - pw));
      if (i == 0) break;
    }
  }
  return std::exp(worst * log_r);
}

}  // namespace pxharm
