#pragma once

#include <string>
#include <vector>

#include "pxharm/exponent.hpp"
#include "pxharm/solver.hpp"

namespace pxharm {

enum class BarrierFamily { WolanskiSuper, WolanskiSub, BaumanSuper, BaumanSub };

std::string to_string(BarrierFamily family);
/// Accepts "wolanski-super", "wolanski-sub", "bauman-super", "bauman-sub".
BarrierFamily parse_barrier_family(const std::string& name);
bool is_super(BarrierFamily family);
bool is_wolanski(BarrierFamily family);

/// Radial barrier on the annulus r < |x - y| < 2r with boundary values 0 and M.
/// Every sub-barrier equals M minus the matching super-barrier.
struct BarrierSpec {
  BarrierFamily family = BarrierFamily::WolanskiSuper;
  Vec2 center = Vec2::Zero();
  double radius = 0.1;
  double height = 1.0;
  double mu = 1.0;
};

/// Closed-form value, gradient, Laplacian and infinity-Laplacian in dimension n
/// (the point lives in the plane; n only enters the Laplacian).
/// Accepts the closed annulus r <= |x - y| <= 2r, so boundary values can be read off.
Jet eval(const BarrierSpec& spec, const Vec2& x, int n = 2);

/// min{(p- - 1) / (4 |grad p|), 1/4}.
double wolanski_r_star(const ExponentField& p);

/// Left side of the sufficient condition for the Gaussian supersolution.
double wolanski_condition(const ExponentField& p, double M, double r, double mu, int n = 2);

/// Smallest mu >= 1 with wolanski_condition <= 0, to 1e-6.
double wolanski_mu_star(const ExponentField& p, double M, double r, int n = 2);

/// (n - p- + 1) / (p- - 1). Can be <= 0 when p- >= n + 1.
double bauman_mu_star(double n, double p_minus);
double bauman_mu_star(const ExponentField& p, int n = 2);

/// mu used by default for power barriers: the formula floored at 1, like the Gaussian search.
double bauman_mu_default(const ExponentField& p, int n = 2);

/// M mu / (2 (2^mu - 1)).
double bauman_r_double_star(double M, double mu);

/// Largest r <= min{r**, 1/4} with r |log r| < 1/(2 |grad p|) and
/// r < 1/(4 |grad p| |log(2^{mu+1} r**)|). mu <= 0 picks bauman_mu_default.
double bauman_r_star(const ExponentField& p, double M, int n = 2, double mu = -1.0);

/// log(4/(1-e^{-3mu})) + |log M| + |log r| + log mu + 3mu.
double wolanski_log_envelope(double M, double r, double mu);

struct CertificationReport {
  BarrierFamily family = BarrierFamily::WolanskiSuper;
  double mu = 0.0;
  double mu_star = 0.0;
  double r = 0.0;
  double r_star = 0.0;
  double M = 1.0;
  int n = 2;
  std::size_t samples = 0;
  /// max of the operator for supersolutions, min for subsolutions.
  double worst_sign = 0.0;
  Vec2 worst_point = Vec2::Zero();
  /// Left side of the printed sufficient condition (<= 0 means it holds).
  double slack = 0.0;
  double max_abs_log_grad = 0.0;
  double log_envelope = 0.0;  ///< NaN for power barriers
  bool log_envelope_ok = true;
  bool boundary_exact = true;  ///< boundary values on both spheres within 1e-12
  double boundary_error = 0.0;
  bool annulus_in_box = true;  ///< the exponent's bounds cover the whole annulus
  bool forced = false;         ///< run outside the admissibility region
  bool passed = false;         ///< sign test (and boundary values) passed
  std::vector<double> operator_values;  ///< filled when requested
};

struct CertifyOptions {
  std::size_t samples = 10000;
  bool force = false;
  bool keep_values = false;
};

/// Evaluates the normalized operator on a radial x angular product sample of
/// the open annulus (relative margin 1e-6 from both spheres). Supersolutions
/// need operator <= 1e-8, subsolutions >= -1e-8.
CertificationReport certify(const BarrierSpec& spec, const ExponentField& p, int n = 2,
                            const CertifyOptions& opts = {});

}  // namespace pxharm
