#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pxharm/types.hpp"

namespace pxharm {

/// A variable exponent p(.) defined on all of R^2.
///
/// Bounds (p_minus, p_plus), the Lipschitz constant and the log-Hoelder
/// constant of 1/p are computed analytically over the field's reference box,
/// which defaults to [-2, 2]^2. The field is immutable once built.
class ExponentField {
 public:
  enum class Kind { Constant, Affine, Bump, Conjugate };

  double eval(const Vec2& x) const;
  Vec2 grad(const Vec2& x) const;

  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  double lip_const() const { return lip_const_; }
  /// Upper bound for the log-Hoelder constant of 1/p on the reference box.
  double clog() const { return clog_; }
  const Box& box() const { return box_; }
  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }

  /// Human-readable form such as "affine:2,0.5,0".
  std::string describe() const;

  /// Pointwise conjugate exponent p'(x) = p(x) / (p(x) - 1).
  ExponentField conjugate() const;

  /// Same exponent with bounds recomputed on another box.
  ExponentField on_box(const Box& box) const;

  static ExponentField constant(double p, const Box& box = reference_box());
  static ExponentField affine(double p0, const Vec2& slope, const Box& box = reference_box());
  /// p(x) = p0 + amplitude * exp(-|x - center|^2 / width^2).
  static ExponentField bump(double p0, double amplitude, const Vec2& center, double width,
                            const Box& box = reference_box());

 private:
  ExponentField() = default;
  void finalize();

  Kind kind_ = Kind::Constant;
  double p0_ = 2.0;
  Vec2 slope_{0.0, 0.0};
  double amplitude_ = 0.0;
  Vec2 center_{0.0, 0.0};
  double width_ = 1.0;
  std::shared_ptr<const ExponentField> base_;
  Box box_ = reference_box();

  double p_minus_ = 2.0;
  double p_plus_ = 2.0;
  double lip_const_ = 0.0;
  double clog_ = 0.0;
};

/// Builds a built-in exponent by name: "constant" {p}, "affine" {p0, a1, a2},
/// "bump" {p0, amplitude, c1, c2, width}. Rejects parameters for which
/// 1 < p_minus <= p_plus < inf fails on `box`.
ExponentField make_exponent(const std::string& kind, const std::vector<double>& params,
                            const Box& box = reference_box());

/// Parses compact specs of the form "const:2", "affine:2:0.5,0" or
/// "bump:2:0.5:0,0:1".
ExponentField parse_exponent(const std::string& spec, const Box& box = reference_box());

/// Empirical log-Hoelder constant of 1/p over the sampled pairs:
/// max |1/p(x) - 1/p(y)| * log(e + 1/|x - y|). Coincident pairs are skipped.
double check_log_holder(const ExponentField& p, const std::vector<std::pair<Vec2, Vec2>>& pairs);

/// Empirical constant c with (1/c) r^{-p(w)} <= r^{-p(x)} <= c r^{-p(w)}
/// over a polar sample of B(w, r).
double holder_ball_constant(const ExponentField& p, const Vec2& w, double r, int radial = 64,
                            int angular = 128);

}  // namespace pxharm
