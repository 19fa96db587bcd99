#include "sparselab/green.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sparselab/errors.hpp"
#include "sparselab/fit.hpp"

namespace sparselab {

namespace {

int default_max_order(int dim) {
  switch (dim) {
    case 1: return 1 << 22;
    case 2: return 4096;
    case 3: return 512;
    default: return 64;
  }
}

std::vector<Coord> canonical(const Site& n) {
  std::vector<Coord> c(n.coords().begin(), n.coords().end());
  for (auto& x : c) x = x < 0 ? -x : x;
  std::sort(c.begin(), c.end());
  return c;
}

// Half-grid trapezoid: the integrand is even in every xi_j, so the N-point sum
// per axis folds onto k = 0..N/2 with weights 1, 2, ..., 2, 1 and the phase
// becomes cos(n_j xi_k).
template <bool RealZ>
std::complex<double> folded_trapezoid(int dim, std::complex<double> z, const std::vector<Coord>& n, int order) {
  const int N = order;
  const int M = N / 2 + 1;
  std::vector<double> cos_table(static_cast<std::size_t>(N));
  for (int m = 0; m < N; ++m) cos_table[static_cast<std::size_t>(m)] = std::cos(2.0 * std::numbers::pi * m / N);

  std::vector<double> a1(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) a1[static_cast<std::size_t>(k)] = 2.0 - 2.0 * cos_table[static_cast<std::size_t>(k)];

  // phase[axis][k] = w_k cos(n_axis xi_k), with the exact reduction (n k mod N).
  std::vector<std::vector<double>> phase(static_cast<std::size_t>(dim), std::vector<double>(static_cast<std::size_t>(M)));
  for (int axis = 0; axis < dim; ++axis) {
    const auto nj = static_cast<long long>(n[static_cast<std::size_t>(axis)]);
    for (int k = 0; k < M; ++k) {
      const double w = (k == 0 || k == N / 2) ? 1.0 : 2.0;
      const auto m = static_cast<std::size_t>((nj * k) % N);
      phase[static_cast<std::size_t>(axis)][static_cast<std::size_t>(k)] = w * cos_table[m];
    }
  }

  const double zr = z.real();
  const double zi = z.imag();

  // Innermost axis summed in a tight loop; outer axes by recursion.
  const auto& last_phase = phase[static_cast<std::size_t>(dim - 1)];
  auto innermost = [&](double shift, double weight) -> std::complex<double> {
    if constexpr (RealZ) {
      double acc = 0.0;
      for (int k = 0; k < M; ++k) acc += last_phase[static_cast<std::size_t>(k)] / (shift + a1[static_cast<std::size_t>(k)] - zr);
      return weight * acc;
    } else {
      double re = 0.0, im = 0.0;
      for (int k = 0; k < M; ++k) {
        const double x = shift + a1[static_cast<std::size_t>(k)] - zr;
        const double inv = last_phase[static_cast<std::size_t>(k)] / (x * x + zi * zi);
        re += x * inv;
        im += zi * inv;
      }
      return {weight * re, weight * im};
    }
  };

  std::complex<double> total = 0.0;
  auto recurse = [&](auto& self, int axis, double shift, double weight) -> void {
    if (axis == dim - 1) {
      total += innermost(shift, weight);
      return;
    }
    const auto& ph = phase[static_cast<std::size_t>(axis)];
    for (int k = 0; k < M; ++k) {
      const double w = ph[static_cast<std::size_t>(k)];
      if (w == 0.0) continue;
      self(self, axis + 1, shift + a1[static_cast<std::size_t>(k)], weight * w);
    }
  };
  recurse(recurse, 0, 0.0, 1.0);
  return total / std::pow(static_cast<double>(N), dim);
}

}  // namespace

struct GreenKernel::Cache {
  using Key = std::tuple<std::uint64_t, std::uint64_t, std::vector<Coord>>;
  mutable std::mutex mutex;
  std::map<Key, std::complex<double>> values;
};

GreenKernel::GreenKernel(int dim, GreenOptions options)
    : dim_(dim), options_(options), max_order_(options.max_order > 0 ? options.max_order : default_max_order(dim)),
      cache_(std::make_shared<Cache>()) {
  if (dim < 1) throw ConfigError("GreenKernel: dimension must be >= 1");
  if (options_.start_order < 8) throw ConfigError("GreenKernel: quadrature order must be >= 8");
  if (!(options_.tolerance > 0.0)) throw ConfigError("GreenKernel: tolerance must be positive");
}

double GreenKernel::spectral_distance(std::complex<double> z) const {
  const double top = 4.0 * dim_;
  const double dx = z.real() < 0.0 ? -z.real() : (z.real() > top ? z.real() - top : 0.0);
  return std::hypot(dx, z.imag());
}

std::complex<double> GreenKernel::trapezoid(std::complex<double> z, const Site& n, int order) const {
  if (n.dim() != dim_) throw ConfigError("GreenKernel: site dimension mismatch");
  if (order < 8) throw ConfigError("GreenKernel: quadrature order must be >= 8");
  const int even = order + (order % 2);
  const auto c = canonical(n);
  return z.imag() == 0.0 ? folded_trapezoid<true>(dim_, z, c, even) : folded_trapezoid<false>(dim_, z, c, even);
}

std::complex<double> GreenKernel::operator()(std::complex<double> z, const Site& n) const {
  if (n.dim() != dim_) throw ConfigError("GreenKernel: site dimension mismatch");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw SpectralParameterError("GreenKernel: spectral parameter is not finite");
  }
  const double dist = spectral_distance(z);
  if (dist < options_.spectral_guard) {
    throw SpectralParameterError("GreenKernel: z is within " + std::to_string(dist) +
                                 " of the free spectrum [0, " + std::to_string(4 * dim_) + "]");
  }

  auto key = Cache::Key{std::bit_cast<std::uint64_t>(z.real()), std::bit_cast<std::uint64_t>(z.imag()), canonical(n)};
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
  }

  const auto& c = std::get<2>(key);
  const Coord reach = c.empty() ? 0 : c.back();
  int order = std::max(options_.start_order, 8);
  while (order < 2 * reach + 32) order *= 2;
  order += order % 2;

  auto eval = [&](int N) {
    return z.imag() == 0.0 ? folded_trapezoid<true>(dim_, z, c, N) : folded_trapezoid<false>(dim_, z, c, N);
  };

  if (order > max_order_) {
    throw AccuracyError("GreenKernel: order " + std::to_string(order) + " needed for site " + n.str() +
                        " exceeds the cap " + std::to_string(max_order_));
  }
  std::complex<double> prev = eval(order);
  std::complex<double> result;
  for (;;) {
    const int next = 2 * order;
    if (next > max_order_) {
      throw AccuracyError("GreenKernel: quadrature did not converge below order " + std::to_string(max_order_) +
                          " at z = (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
    }
    const auto cur = eval(next);
    if (std::abs(cur - prev) <= options_.tolerance * std::max(1.0, std::abs(cur))) {
      result = cur;
      break;
    }
    prev = cur;
    order = next;
  }

  std::lock_guard lock(cache_->mutex);
  cache_->values.emplace(std::move(key), result);
  return result;
}

std::size_t GreenKernel::cache_size() const {
  std::lock_guard lock(cache_->mutex);
  return cache_->values.size();
}

std::complex<double> green_eval(int dim, std::complex<double> z, const Site& n, int order) {
  GreenOptions opts;
  opts.start_order = order;
  return GreenKernel(dim, opts)(z, n);
}

void require_outside_band(int dim, double lambda, double eps) {
  if (lambda >= -eps && lambda <= 4.0 * dim + eps) {
    throw SpectralParameterError("lambda = " + std::to_string(lambda) + " lies inside [-" + std::to_string(eps) +
                                 ", 4d + " + std::to_string(eps) + "]");
  }
}

DecayFit green_decay_fit(const GreenKernel& green, double lambda, const Site& direction, int n_max, double eps) {
  require_outside_band(green.dim(), lambda, eps);
  if (direction.dim() != green.dim()) throw ConfigError("green_decay_fit: direction has wrong dimension");
  if (direction.norm_inf() == 0) throw ConfigError("green_decay_fit: direction must be nonzero");
  if (n_max < 2) throw ConfigError("green_decay_fit: n_max must be >= 2");

  const double g0 = std::abs(green(lambda, Site::origin(green.dim())));
  const double floor = 1e-13 * g0;
  const double step = direction.norm();
  std::vector<double> xs, ys;
  for (int k = 1; k <= n_max; ++k) {
    const double g = std::abs(green(lambda, static_cast<Coord>(k) * direction));
    if (!(g > floor)) break;
    xs.push_back(k * step);
    ys.push_back(std::log(g));
  }
  if (xs.size() < 3) {
    throw AccuracyError("green_decay_fit: fewer than three points above the numerical floor");
  }
  const auto line = fit_line(xs, ys);
  DecayFit fit;
  fit.gamma = -line.slope;
  fit.C = std::exp(line.intercept);
  fit.residual = line.r2_deficit;
  fit.rms = line.rms;
  fit.points = line.points;
  return fit;
}

double DecayEnvelope::bound(double r) const { return C * std::exp(-gamma * r); }

DecayEnvelope combes_thomas_envelope(int dim, double lambda, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("combes_thomas_envelope: fraction must be in (0,1)");
  double gap;
  if (lambda < 0.0) {
    gap = -lambda;
  } else if (lambda > 4.0 * dim) {
    gap = lambda - 4.0 * dim;
  } else {
    throw SpectralParameterError("combes_thomas_envelope: lambda inside [0, 4d]");
  }
  DecayEnvelope env;
  env.gamma = std::acosh(1.0 + 0.5 * fraction * gap);
  env.C = 1.0 / ((1.0 - fraction) * gap);
  return env;
}

namespace {

// 2 K(k) / (pi s) with k = 4 / s and K(k) = pi / (2 agm(1, k')). Forming k'
// from -lambda directly keeps full precision as lambda -> 0, where 1 - k cancels.
double onsite_2d(double lambda) {
  const double s = 4.0 - lambda;
  double a = 1.0, b = std::sqrt(-lambda * (8.0 - lambda)) / s;
  while (a - b > 1e-15 * a) {
    const double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return 1.0 / (s * 0.5 * (a + b));
}

}  // namespace

double green_onsite(int dim, double lambda, double tolerance) {
  if (!(lambda < 0.0)) throw SpectralParameterError("green_onsite: lambda must be negative");
  switch (dim) {
    case 1:
      return 1.0 / std::sqrt(-lambda * (4.0 - lambda));
    case 2:
      return onsite_2d(lambda);
    case 3: {
      using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
      auto f = [lambda](double xi) {
        const double s = std::sin(0.5 * xi);
        return onsite_2d(lambda - 4.0 * s * s);
      };
      // The d = 2 value has a log singularity at the edge, reached at xi = 0
      // as lambda -> 0; breakpoints on the sqrt|lambda| scale resolve it.
      std::vector<double> cuts{0.0};
      for (double c = std::sqrt(-lambda); c < std::numbers::pi; c *= 8.0) cuts.push_back(c);
      cuts.push_back(std::numbers::pi);
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double err = 0.0;
        total += GK::integrate(f, cuts[i], cuts[i + 1], 15, tolerance, &err);
      }
      return total / std::numbers::pi;
    }
    default:
      throw ConfigError("green_onsite: dimension must be 1, 2 or 3");
  }
}

double coupling_bound(const GreenKernel& green, double lambda0) {
  if (!(lambda0 < 0.0)) throw SpectralParameterError("coupling_bound: lambda0 must be negative");
  return 1.0 / green(lambda0, Site::origin(green.dim())).real();
}

}  // namespace sparselab
