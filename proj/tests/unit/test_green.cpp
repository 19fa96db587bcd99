#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <thread>

#include "generators.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/green.hpp"

namespace sparselab {
namespace {

using testing::engine;

// d = 1: G(lambda; n) = r^|n| / sqrt(A^2 - 4), A = 2 - lambda, r the small root of r^2 - A r + 1.
double green_1d(double lambda, Coord n) {
  const double A = 2.0 - lambda;
  const double s = std::sqrt(A * A - 4.0);
  const double r = (A - s) / 2.0;
  return std::pow(r, static_cast<double>(std::abs(n))) / s;
}

TEST(Green, ClosedFormValues) {
  const GreenKernel g(1);
  EXPECT_NEAR(g(-1.0, Site{0}).real(), 0.4472135955, 1e-10);
  EXPECT_NEAR(g(-1.0, Site{1}).real(), 0.3819660113 / std::sqrt(5.0), 1e-10);
  EXPECT_NEAR(g(-1.0, Site{-1}).real(), 0.3819660113 / std::sqrt(5.0), 1e-10);
}

TEST(Green, OneDimensionalOracle) {
  const GreenKernel g(1);
  for (double lambda : {-0.1, -1.0, -10.0}) {
    for (Coord n = -20; n <= 20; ++n) {
      const auto v = g(lambda, Site{n});
      EXPECT_NEAR(v.real(), green_1d(lambda, n), 1e-10) << lambda << " " << n;
      EXPECT_NEAR(v.imag(), 0.0, 1e-14);
    }
  }
}

TEST(Green, AboveTheBandAlternatesSign) {
  // xi -> xi + pi maps a to 4d - a, so G(z; n) = -(-1)^{|n|_1} G(4d - z; n).
  const GreenKernel g(2);
  for (Coord x = 0; x < 4; ++x) {
    const Site n{x, 1};
    const double sign = ((x + 1) % 2 == 0) ? 1.0 : -1.0;
    EXPECT_NEAR(g(9.5, n).real(), -sign * g(8.0 - 9.5, n).real(), 1e-12);
  }
}

TEST(Green, LargeImaginaryZ) {
  for (int d = 1; d <= 3; ++d) {
    const GreenKernel g(d);
    const std::complex<double> z(0.0, 1e6);
    const auto v = g(z, Site::origin(d));
    EXPECT_LT(std::abs(v + 1.0 / z) / std::abs(1.0 / z), 1e-5);
  }
}

TEST(Green, OnsiteMatchesEllipticAndReducedIntegral) {
  // 2D: G(lambda; 0) = 2 K(k) / (pi (4 - lambda)), k = 4 / (4 - lambda); K(0.8) from tables.
  EXPECT_NEAR(green_onsite(2, -1.0), 2.0 * 1.9953027776647294 / (std::numbers::pi * 5.0), 1e-14);
  // 3D edge value from Watson's integral W = 1.5163860591519780: G(0-; 0) = W / 6.
  EXPECT_NEAR(green_onsite(3, -1e-12), 1.5163860591519780 / 6.0, 2e-6);
  for (int d = 1; d <= 3; ++d) {
    const GreenKernel g(d);
    for (double lambda : {-0.05, -0.3, -1.0, -4.0, -25.0}) {
      EXPECT_NEAR(green_onsite(d, lambda), g(lambda, Site::origin(d)).real(), 1e-12) << d << " " << lambda;
    }
  }
  EXPECT_THROW(green_onsite(2, 0.0), SpectralParameterError);
}

TEST(Green, SymmetryProperty) {
  for (int c = 0; c < 40; ++c) {
    auto g = engine(21, c);
    const int d = static_cast<int>(testing::integer(g, 1, 3));
    const GreenKernel kernel(d);
    const std::complex<double> z(testing::uniform(g, -6.0, -0.2), testing::uniform(g, -1.0, 1.0));
    const Site n = testing::site(g, d, 8);
    std::vector<Coord> c2(n.coords().begin(), n.coords().end());
    std::reverse(c2.begin(), c2.end());
    c2[0] = -c2[0];
    const auto a = kernel(z, n);
    const auto b = kernel(z, Site(c2));
    // The uncached trapezoid at a fixed order is the independent check.
    const auto t = kernel.trapezoid(z, Site(c2), 256);
    EXPECT_EQ(a, b);
    EXPECT_LT(std::abs(a - t), 1e-10);
  }
}

TEST(Green, ResolventIdentityProperty) {
  for (int d = 1; d <= 2; ++d) {
    const GreenKernel kernel(d);
    const double lambda = -1.0;
    const Coord R = 12;
    const LatticeBox box(d, R, Boundary::dirichlet);
    LatticeField gfield(box);
    for (std::size_t i = 0; i < box.size(); ++i) gfield.values()[static_cast<Eigen::Index>(i)] = kernel(lambda, box.site(i));
    auto h = apply_h0(gfield);
    h.values() -= lambda * gfield.values();
    const auto env = combes_thomas_envelope(d, lambda);
    for (std::size_t i = 0; i < box.size(); ++i) {
      const Site n = box.site(i);
      const double expect = n == Site::origin(d) ? 1.0 : 0.0;
      const double err = std::abs(h.values()[static_cast<Eigen::Index>(i)] - expect);
      // Truncation at the box edge contributes at most 2d times the envelope at the edge.
      const double allowed = 1e-12 + 2.0 * d * env.bound(static_cast<double>(R + 1 - n.norm_inf()));
      EXPECT_LT(err, allowed) << n.str();
    }
  }
}

TEST(Green, OrderDoublingConvergesAwayFromBand) {
  for (int c = 0; c < 20; ++c) {
    auto g = engine(22, c);
    const int d = static_cast<int>(testing::integer(g, 1, 3));
    const GreenKernel kernel(d);
    const double lambda = testing::uniform(g, -8.0, -0.5);
    const Site n = testing::site(g, d, 5);
    const auto a = kernel.trapezoid(lambda, n, 128);
    const auto b = kernel.trapezoid(lambda, n, 256);
    EXPECT_LT(std::abs(a - b), 1e-10);
  }
}

TEST(Green, CacheDoesNotChangeResultsAcrossThreads) {
  const GreenKernel shared(2);
  std::vector<std::complex<double>> fresh(64), cached(64);
  for (int i = 0; i < 64; ++i) fresh[static_cast<std::size_t>(i)] = GreenKernel(2)(-1.5, Site{i % 8, i / 8});
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < 64; i += 4) cached[static_cast<std::size_t>(i)] = shared(-1.5, Site{i % 8, i / 8});
    });
  }
  for (auto& th : pool) th.join();
  EXPECT_EQ(fresh, cached);
  EXPECT_GT(shared.cache_size(), 0u);
}

TEST(Green, RefusesNearBand) {
  const GreenKernel g(2);
  EXPECT_THROW(g(-1e-8, Site{0, 0}), SpectralParameterError);
  EXPECT_THROW(g(3.0, Site{0, 0}), SpectralParameterError);
  EXPECT_THROW(require_outside_band(2, -0.05, 0.1), SpectralParameterError);
  EXPECT_NO_THROW(require_outside_band(2, 8.2, 0.1));
}

TEST(DecayFit, OneDimensionalRate) {
  const auto fit = green_decay_fit(GreenKernel(1), -1.0, Site{1}, 20);
  const double gamma = std::log(2.0 / (3.0 - std::sqrt(5.0)));
  EXPECT_NEAR(fit.gamma, gamma, 0.02 * gamma);
  EXPECT_NEAR(fit.gamma, 0.9624, 1e-4);
}

TEST(DecayFit, RateIncreasesDeeperInTheGap) {
  const GreenKernel g(2);
  double prev = 0.0;
  for (double lambda : {-1.0, -2.0, -4.0, -8.0}) {
    const auto fit = green_decay_fit(g, lambda, Site{1, 0}, 10);
    EXPECT_GT(fit.gamma, prev) << lambda;
    prev = fit.gamma;
  }
}

TEST(DecayFit, TwoDimensionalResidual) {
  const GreenKernel g(2);
  EXPECT_LT(green_decay_fit(g, -1.0, Site{1, 0}, 10).residual, 1e-3);
  EXPECT_LT(green_decay_fit(g, -1.0, Site{1, 1}, 10).residual, 1e-3);
}

TEST(Envelope, BoundsTheKernelProperty) {
  for (int c = 0; c < 60; ++c) {
    auto g = engine(23, c);
    const int d = static_cast<int>(testing::integer(g, 1, 3));
    const GreenKernel kernel(d);
    const double lambda = c % 2 ? testing::uniform(g, -6.0, -0.2) : testing::uniform(g, 4.0 * d + 0.2, 4.0 * d + 6.0);
    const auto env = combes_thomas_envelope(d, lambda);
    const Site n = testing::site(g, d, 10);
    EXPECT_LE(std::abs(kernel(lambda, n)), env.bound(n.norm()) * (1.0 + 1e-12)) << d << " " << lambda << " " << n.str();
  }
}

TEST(CouplingBound, ValuesAndMonotonicity) {
  EXPECT_NEAR(coupling_bound(GreenKernel(1), -1.0), std::sqrt(5.0), 1e-10);
  EXPECT_NEAR(coupling_bound(GreenKernel(1), -1000.0) / 1000.0, 1.0, 5e-3);
  for (int d = 1; d <= 3; ++d) {
    const GreenKernel g(d);
    EXPECT_LT(coupling_bound(g, -0.5), coupling_bound(g, -1.0));
    EXPECT_LT(coupling_bound(g, -1.0), coupling_bound(g, -2.0));
  }
  EXPECT_THROW(coupling_bound(GreenKernel(1), 0.5), SpectralParameterError);
}

}  // namespace
}  // namespace sparselab
