#pragma once

#include <complex>
#include <cstddef>
#include <memory>

#include "sparselab/lattice.hpp"

namespace sparselab {

struct GreenOptions {
  /// First quadrature order tried; raised automatically so that the order
  /// exceeds twice the largest |n_j| (otherwise aliasing can fake agreement).
  int start_order = 32;
  /// Largest order per axis; 0 picks a per-dimension default.
  int max_order = 0;
  /// Successive doublings must agree to tolerance * max(1, |G|).
  double tolerance = 1e-10;
  /// Minimum distance of z from [0, 4d].
  double spectral_guard = 1e-6;
};

/// Free lattice Green's function G(z; n) = ((H0 - z)^{-1} chi_0, chi_n),
/// evaluated as the tensor trapezoidal rule for
///   (2 pi)^{-d} \int_{T^d} e^{-i xi.n} / (a(xi) - z) dxi.
/// The rule is spectrally accurate off [0, 4d]; the order is doubled until two
/// successive results agree.
///
/// Evaluation canonicalizes n (absolute values, sorted), so the permutation and
/// sign-flip symmetries hold bit-exactly. Results are cached by the exact bits
/// of z and the canonical site; copies share the cache, which is guarded by a
/// mutex and only ever filled with values the uncached path would return.
class GreenKernel {
 public:
  explicit GreenKernel(int dim, GreenOptions options = {});

  int dim() const { return dim_; }
  const GreenOptions& options() const { return options_; }
  int max_order() const { return max_order_; }

  std::complex<double> operator()(std::complex<double> z, const Site& n) const;

  /// Fixed-order trapezoid, no adaptivity and no cache.
  std::complex<double> trapezoid(std::complex<double> z, const Site& n, int order) const;

  /// Distance of z from the free spectrum [0, 4d].
  double spectral_distance(std::complex<double> z) const;

  std::size_t cache_size() const;

 private:
  struct Cache;

  int dim_;
  GreenOptions options_;
  int max_order_;
  std::shared_ptr<Cache> cache_;
};

/// One-shot evaluation with a fresh kernel.
std::complex<double> green_eval(int dim, std::complex<double> z, const Site& n, int order = 32);

/// Throws SpectralParameterError unless lambda lies outside [-eps, 4d + eps].
void require_outside_band(int dim, double lambda, double eps);

/// Least-squares fit of log|G(lambda; k e)| against k|e|, k = 1..n_max.
struct DecayFit {
  double gamma = 0.0;     ///< decay rate (negated slope)
  double C = 0.0;         ///< exp(intercept)
  double residual = 0.0;  ///< 1 - R^2 of the log-linear fit
  double rms = 0.0;       ///< rms residual of log|G|
  int points = 0;         ///< points above the numerical floor
};

DecayFit green_decay_fit(const GreenKernel& green, double lambda, const Site& direction, int n_max,
                         double eps = 0.1);

/// Rigorous bound |G(lambda; n)| <= C exp(-gamma |n|) for real lambda outside
/// [0, 4d], from sum_n G(lambda; n) e^{eta.n} = 1 / (a(i eta) - lambda) with
/// eta = s n/|n|: any s with 2(cosh s - 1) < dist(lambda, [0,4d]) works.
/// `fraction` is the share of that distance spent on s.
struct DecayEnvelope {
  double gamma = 0.0;
  double C = 0.0;
  double bound(double r) const;
};

DecayEnvelope combes_thomas_envelope(int dim, double lambda, double fraction = 0.5);

/// G(lambda; 0) for real lambda < 0 by dimension reduction: the closed form in
/// d = 1, the complete elliptic integral in d = 2, and an adaptive integral of
/// the d = 2 value over one frequency in d = 3. Unlike the torus quadrature it
/// stays accurate as lambda approaches the band edge.
double green_onsite(int dim, double lambda, double tolerance = 1e-14);

/// Amplitude bound a = 1 / G(lambda0; 0) for lambda0 < 0.
double coupling_bound(const GreenKernel& green, double lambda0);

}  // namespace sparselab
