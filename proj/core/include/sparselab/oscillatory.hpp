#pragma once

#include <functional>
#include <vector>

#include "sparselab/fit.hpp"
#include "sparselab/lattice.hpp"

namespace sparselab {

enum class BumpProfile {
  smooth,     ///< exp(-1 / (1 - x^2)), C-infinity with compact support
  cos_power,  ///< cos(pi x / 2)^2
};

/// Oscillatory integral over a chart of the level curve {a(xi) = tau1} in d = 2.
/// The curve is star-shaped about its center (0,0) for tau1 < 4 and (pi,pi)
/// for tau1 > 4 and is parametrized by the ray angle theta; the cutoff is
/// supported on |theta - center_angle| < half_width.
struct QIntegralSpec {
  double tau1 = 2.0;
  BumpProfile profile = BumpProfile::smooth;
  double center_angle = 0.0;
  double half_width = 0.7;
  std::vector<Site> js;
  int gauss_points_per_period = 20;
  int min_panels = 16;
  int max_panels = 1 << 20;
  double refinement = 1.0;  ///< multiplies the panel count
  double min_decades = 1.2;  ///< span of |j| required by q_decay_fit

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Point of the level curve on the ray at angle theta, with the Jacobian
/// omega = rho / (grad a . e_theta) of xi -> (a, theta) and the curvature.
struct LevelPoint {
  double xi[2] = {0.0, 0.0};
  double rho = 0.0;
  double omega = 0.0;
  double grad_norm = 0.0;
  double curvature = 0.0;
};

/// Throws RegularityError if the gradient, its radial component or the
/// curvature is below `floor` at the point.
LevelPoint level_point(double tau1, double theta, double floor = 1e-8);

double bump_profile(BumpProfile profile, double x);

/// Q(tau1, j) = | int e^{i j.xi(theta)} phi(theta) omega(theta) dtheta |.
double q_integral(const QIntegralSpec& spec, const Site& j);

struct QDecayFit {
  double exponent = 0.0;  ///< slope of log Q against log |j|
  double residual = 0.0;  ///< rms of the log-log fit
  std::vector<double> norms;
  std::vector<double> values;
};

using QEvaluator = std::function<double(const Site&)>;

/// Least-squares slope of log Q vs log |j| over spec.js. `evaluate` replaces
/// q_integral when given.
QDecayFit q_decay_fit(const QIntegralSpec& spec, const QEvaluator& evaluate = {});

/// Slope and intercept of log y against log x.
LineFit fit_power_law(std::span<const double> x, std::span<const double> y);

}  // namespace sparselab
