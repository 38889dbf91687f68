#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pxharm {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Raised when an operation's precondition does not hold for its inputs.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot produce a meaningful value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box [lo, hi].
struct Box {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};

  bool contains(const Vec2& x) const {
    return x.x() >= lo.x() && x.x() <= hi.x() && x.y() >= lo.y() && x.y() <= hi.y();
  }
  Vec2 center() const { return 0.5 * (lo + hi); }
  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
};

/// A named hypothesis of the statement a check is modelled on, and whether
/// the current inputs satisfy it.
struct HypothesisFlag {
  std::string name;
  bool holds = true;
};
using HypothesisStatus = std::vector<HypothesisFlag>;

inline bool all_hold(const HypothesisStatus& status) {
  for (const auto& f : status)
    if (!f.holds) return false;
  return true;
}

inline Box reference_box() { return Box{Vec2(-2.0, -2.0), Vec2(2.0, 2.0)}; }

}  // namespace pxharm
