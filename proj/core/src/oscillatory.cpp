#include "sparselab/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "sparselab/errors.hpp"

namespace sparselab {

namespace {

constexpr double pi = std::numbers::pi;
using Gauss = boost::math::quadrature::gauss<double, 20>;

double symbol2(double x, double y) { return 4.0 - 2.0 * std::cos(x) - 2.0 * std::cos(y); }

// Derivative of xi(theta) along the chart, from a(c + rho e) = tau1.
double chart_speed(double tau1, double theta) {
  const LevelPoint p = level_point(tau1, theta, 0.0);
  const double gx = 2.0 * std::sin(p.xi[0]);
  const double gy = 2.0 * std::sin(p.xi[1]);
  const double radial = gx * std::cos(theta) + gy * std::sin(theta);
  const double tangential = -gx * std::sin(theta) + gy * std::cos(theta);
  const double drho = -p.rho * tangential / radial;
  return std::hypot(drho, p.rho);
}

}  // namespace

void QIntegralSpec::validate() const {
  if (!(tau1 > 0.0 && tau1 < 8.0)) throw ConfigError("q_integral: tau1 must lie in (0, 8)");
  if (!(half_width > 0.0 && half_width <= pi)) throw ConfigError("q_integral: half_width must lie in (0, pi]");
  if (!std::isfinite(center_angle)) throw ConfigError("q_integral: center_angle must be finite");
  if (gauss_points_per_period < 20) throw ConfigError("q_integral: need at least 20 points per oscillation period");
  if (min_panels < 1 || max_panels < min_panels) throw ConfigError("q_integral: bad panel limits");
  if (!(refinement > 0.0)) throw ConfigError("q_integral: refinement must be positive");
  if (!(min_decades >= 0.0)) throw ConfigError("q_integral: min_decades must be nonnegative");
  for (const auto& j : js) {
    if (j.dim() != 2) throw ConfigError("q_integral: j must be a site of Z^2");
  }
}

LevelPoint level_point(double tau1, double theta, double floor) {
  if (!(tau1 > 0.0 && tau1 < 8.0)) throw RegularityError("level_point: tau1 outside (0, 8)");
  if (std::abs(tau1 - 4.0) < 1e-12) throw RegularityError("level_point: tau1 = 4 is the singular level");
  const bool upper = tau1 > 4.0;
  const double cx = upper ? pi : 0.0;
  const double target = upper ? 8.0 - tau1 : tau1;
  const double ex = std::cos(theta);
  const double ey = std::sin(theta);
  // a(eta) increases along the ray while rho |e_j| < pi, and is >= 4 at the edge.
  const double rho_max = pi / std::max(std::abs(ex), std::abs(ey));
  auto g = [&](double rho) { return symbol2(rho * ex, rho * ey) - target; };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iterations = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, rho_max, g(0.0), g(rho_max), tol, iterations);
  const double rho = 0.5 * (lo + hi);

  LevelPoint p;
  p.rho = rho;
  p.xi[0] = cx + rho * ex;
  p.xi[1] = cx + rho * ey;
  const double gx = 2.0 * std::sin(p.xi[0]);
  const double gy = 2.0 * std::sin(p.xi[1]);
  const double hxx = 2.0 * std::cos(p.xi[0]);
  const double hyy = 2.0 * std::cos(p.xi[1]);
  p.grad_norm = std::hypot(gx, gy);
  const double radial = std::abs(gx * ex + gy * ey);
  p.curvature = p.grad_norm > 0.0 ? std::abs(hxx * gy * gy + hyy * gx * gx) / std::pow(p.grad_norm, 3) : 0.0;
  p.omega = radial > 0.0 ? rho / radial : 0.0;
  if (!(p.grad_norm > floor) || !(radial > floor) || !(p.curvature > floor)) {
    throw RegularityError("level_point: chart degenerates at theta = " + std::to_string(theta) +
                          " (|grad a| = " + std::to_string(p.grad_norm) + ", curvature = " +
                          std::to_string(p.curvature) + ")");
  }
  return p;
}

double bump_profile(BumpProfile profile, double x) {
  if (!(std::abs(x) < 1.0)) return 0.0;
  switch (profile) {
    case BumpProfile::smooth: return std::exp(-1.0 / (1.0 - x * x));
    case BumpProfile::cos_power: return std::pow(std::cos(0.5 * pi * x), 2);
  }
  return 0.0;
}

double q_integral(const QIntegralSpec& spec, const Site& j) {
  spec.validate();
  if (j.dim() != 2) throw ConfigError("q_integral: j must be a site of Z^2");
  const double a = spec.center_angle - spec.half_width;
  const double width = 2.0 * spec.half_width;

  double speed = 0.0;
  constexpr int samples = 257;
  for (int s = 0; s < samples; ++s) speed = std::max(speed, chart_speed(spec.tau1, a + width * s / (samples - 1)));
  speed *= 1.25;

  const double jn = j.norm();
  const int by_oscillation =
      jn > 0.0 ? static_cast<int>(std::ceil(width * jn * speed * spec.gauss_points_per_period / (2.0 * pi * 20.0))) : 0;
  const double wanted = std::ceil(std::max(spec.min_panels, by_oscillation) * spec.refinement);
  if (wanted > spec.max_panels) {
    throw AccuracyError("q_integral: " + std::to_string(wanted) + " panels needed for |j| = " + std::to_string(jn) +
                        ", cap is " + std::to_string(spec.max_panels));
  }
  const int panels = static_cast<int>(wanted);
  const double h = width / panels;
  const double jx = static_cast<double>(j[0]);
  const double jy = static_cast<double>(j[1]);

  const auto& nodes = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  std::complex<double> total = 0.0;
  auto integrand = [&](double theta) {
    const LevelPoint p = level_point(spec.tau1, theta);
    const double x = (theta - spec.center_angle) / spec.half_width;
    return std::polar(bump_profile(spec.profile, x) * p.omega, jx * p.xi[0] + jy * p.xi[1]);
  };
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * h;
    std::complex<double> panel = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double off = 0.5 * h * nodes[i];
      panel += weights[i] * (integrand(mid - off) + integrand(mid + off));
    }
    total += 0.5 * h * panel;
  }
  return std::abs(total);
}

LineFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("fit_power_law: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw AccuracyError("fit_power_law: nonpositive data cannot be log-fitted");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly);
}

QDecayFit q_decay_fit(const QIntegralSpec& spec, const QEvaluator& evaluate) {
  spec.validate();
  if (spec.js.size() < 3) throw ConfigError("q_decay_fit: need at least three j values");
  QDecayFit out;
  for (const auto& j : spec.js) {
    const double n = j.norm();
    if (n == 0.0) throw ConfigError("q_decay_fit: j = 0 has no decay to fit");
    out.norms.push_back(n);
  }
  const auto [mn, mx] = std::minmax_element(out.norms.begin(), out.norms.end());
  const double decades = std::log10(*mx / *mn);
  if (decades + 1e-12 < spec.min_decades) {
    throw ConfigError("q_decay_fit: |j| spans " + std::to_string(decades) + " decades, need " +
                      std::to_string(spec.min_decades));
  }
  for (const auto& j : spec.js) out.values.push_back(evaluate ? evaluate(j) : q_integral(spec, j));
  const LineFit line = fit_power_law(out.norms, out.values);
  out.exponent = line.slope;
  out.residual = line.rms;
  return out;
}

}  // namespace sparselab
