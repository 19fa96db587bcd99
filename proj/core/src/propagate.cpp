#include "sparselab/propagate.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <fftw3.h>

#include "sparselab/errors.hpp"

namespace sparselab {

namespace {

// The FFTW planner is not reentrant; execution with the new-array interface is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct Coefficients {
  std::vector<double> bessel;  // J_k(|x|)
  bool negative = false;
};

Coefficients bessel_coefficients(double x, const ChebyshevOptions& options) {
  Coefficients c;
  c.negative = x < 0.0;
  const double ax = std::abs(x);
  for (int k = 0;; ++k) {
    if (k > options.max_terms) {
      throw AccuracyError("full_propagate: t * spectral halfwidth = " + std::to_string(ax) + " needs more than " +
                          std::to_string(options.max_terms) + " Chebyshev terms");
    }
    const double j = boost::math::cyl_bessel_j(k, ax);
    c.bessel.push_back(j);
    if (k > ax && std::abs(j) < 0.1 * options.tolerance) break;
  }
  return c;
}

}  // namespace

void PropagatorSpec::validate() const {
  if (times.empty()) throw ConfigError("propagator: empty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(std::isfinite(times[i]) && times[i] > 0.0)) throw ConfigError("propagator: times must be positive and finite");
    if (i > 0 && !(times[i] > times[i - 1])) throw ConfigError("propagator: times must be strictly increasing");
  }
  if (!(tolerance > 0.0 && tolerance <= 1e-4)) throw ConfigError("propagator: tolerance must lie in (0, 1e-4]");
  if (dim < 1 || radius < 0) throw ConfigError("propagator: bad box");
}

LatticeField free_propagate(const LatticeField& f, double t) {
  const LatticeBox& box = f.box();
  if (box.boundary() != Boundary::periodic) throw ConfigError("free_propagate: needs a periodic box");
  if (t == 0.0) return f;
  const int d = box.dim();
  const int L = static_cast<int>(box.side());
  std::vector<int> dims(static_cast<std::size_t>(d), L);

  Eigen::VectorXcd work = f.values();
  auto* data = reinterpret_cast<fftw_complex*>(work.data());
  fftw_plan forward, backward;
  {
    std::lock_guard lock(fftw_planner_mutex());
    forward = fftw_plan_dft(d, dims.data(), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft(d, dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute_dft(forward, data, data);

  std::vector<double> axis_symbol(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) axis_symbol[static_cast<std::size_t>(k)] = 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / L);
  const double scale = 1.0 / static_cast<double>(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    double a = 0.0;
    std::size_t rem = i;
    for (int axis = d - 1; axis >= 0; --axis) {
      a += axis_symbol[rem % static_cast<std::size_t>(L)];
      rem /= static_cast<std::size_t>(L);
    }
    work[static_cast<Eigen::Index>(i)] *= std::polar(scale, t * a);
  }

  fftw_execute_dft(backward, data, data);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  return LatticeField(box, std::move(work));
}

int chebyshev_terms(const BoxOperator& H, double t, ChebyshevOptions options) {
  const Interval b = H.spectral_bounds();
  return static_cast<int>(bessel_coefficients(t * 0.5 * b.width(), options).bessel.size());
}

LatticeField full_propagate(const BoxOperator& H, const LatticeField& f, double t, ChebyshevOptions options) {
  if (!(f.box() == H.box())) throw ConfigError("full_propagate: field lives on a different box");
  if (!(options.tolerance > 0.0)) throw ConfigError("full_propagate: tolerance must be positive");
  if (t == 0.0) return f;

  const Interval b = H.spectral_bounds();
  const double c = b.center();
  const double half = 0.5 * b.width();
  const auto coeff = bessel_coefficients(t * half, options);

  // X = (H - c) / half has spectrum in [-1, 1];
  // e^{-itH} = e^{-itc} sum_k (2 - delta_k0) (-i)^k J_k(t half) T_k(X).
  auto apply_x = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return (H.apply(v) - c * v) / half; };
  const std::complex<double> step = coeff.negative ? std::complex<double>(0.0, 1.0) : std::complex<double>(0.0, -1.0);

  Eigen::VectorXcd prev = f.values();
  Eigen::VectorXcd cur = apply_x(prev);
  Eigen::VectorXcd acc = coeff.bessel[0] * prev;
  std::complex<double> phase = step;
  if (coeff.bessel.size() > 1) acc += (2.0 * coeff.bessel[1]) * phase * cur;
  for (std::size_t k = 2; k < coeff.bessel.size(); ++k) {
    Eigen::VectorXcd next = 2.0 * apply_x(cur) - prev;
    prev = std::move(cur);
    cur = std::move(next);
    phase *= step;
    acc += (2.0 * coeff.bessel[k]) * phase * cur;
  }
  acc *= std::polar(1.0, -t * c);
  return LatticeField(H.box(), std::move(acc));
}

}  // namespace sparselab
