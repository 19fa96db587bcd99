#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "sparselab/eigensolve.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/oscillatory.hpp"
#include "sparselab/propagate.hpp"
#include "sparselab/wave_probe.hpp"

namespace sparselab {
namespace {

using testing::engine;

LatticeField unit_packet(const LatticeBox& box, double width) {
  LatticeField f(box);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double r = box.site(i).norm();
    f.values()[static_cast<Eigen::Index>(i)] = std::exp(-r * r / (2 * width * width));
  }
  f.values() /= f.norm();
  return f;
}

TEST(FreePropagate, IdentityUnitarityAndGroupProperty) {
  for (int c = 0; c < 12; ++c) {
    auto g = engine(41, c);
    const LatticeBox box(static_cast<int>(testing::integer(g, 1, 3)), testing::integer(g, 2, 7));
    const auto f = testing::field(g, box);
    EXPECT_EQ(free_propagate(f, 0.0).values(), f.values());
    const double t = testing::uniform(g, -20, 20), s = testing::uniform(g, -20, 20);
    const auto ft = free_propagate(f, t);
    EXPECT_NEAR(ft.norm(), f.norm(), 1e-12 * f.norm());
    const auto lhs = free_propagate(ft, s);
    const auto rhs = free_propagate(f, t + s);
    EXPECT_LT((lhs.values() - rhs.values()).norm(), 1e-11 * f.norm());
  }
  EXPECT_THROW(free_propagate(LatticeField(LatticeBox(1, 3, Boundary::dirichlet)), 1.0), ConfigError);
}

TEST(FreePropagate, OneDimensionalBesselKernel) {
  // On the infinite chain |(e^{itH0} delta_0)(n)| = |J_n(2t)|; wraparound is negligible at this radius.
  const LatticeBox box(1, 80);
  const double t = 7.0;
  const auto u = free_propagate(LatticeField::delta(box, Site{0}), t);
  for (Coord n = 0; n <= 30; ++n) {
    EXPECT_NEAR(std::abs(u.at(Site{n})), std::abs(std::cyl_bessel_j(static_cast<double>(n), 2 * t)), 1e-12) << n;
  }
}

TEST(FullPropagate, FreeCaseAgreesWithFft) {
  for (int c = 0; c < 8; ++c) {
    auto g = engine(42, c);
    const LatticeBox box(static_cast<int>(testing::integer(g, 1, 2)), testing::integer(g, 3, 10));
    const BoxOperator H(box, Potential(box.dim()));
    const auto f = testing::field(g, box);
    const double t = testing::uniform(g, -30, 30);
    const auto a = full_propagate(H, f, t);
    const auto b = free_propagate(f, -t);
    EXPECT_LT((a.values() - b.values()).norm(), 1e-9 * f.norm()) << t;
  }
}

TEST(FullPropagate, EigenvectorPicksUpAPhase) {
  auto g = engine(43, 0);
  const LatticeBox box(2, 5, Boundary::dirichlet);
  const BoxOperator H(box, testing::potential(g, box, 8, -3.0, 1.0));
  const auto pairs = eigs_in_window(H, {-3.0, 1.0}, 3);
  ASSERT_FALSE(pairs.empty());
  for (const auto& p : pairs) {
    const LatticeField v(box, p.vector.cast<std::complex<double>>());
    for (double t : {0.5, 9.0, -4.0}) {
      const auto w = full_propagate(H, v, t);
      EXPECT_LT((w.values() - std::polar(1.0, -t * p.value) * v.values()).norm(), 1e-9);
    }
  }
}

TEST(FullPropagate, NormPreservedAcrossTimes) {
  auto g = engine(44, 0);
  const LatticeBox box(2, 12);
  const BoxOperator H(box, testing::potential(g, box, 12, -2.0, 2.0));
  const auto f = unit_packet(box, 2.0);
  const double tol = 1e-10;
  for (double t : {1.0, 10.0, 100.0}) EXPECT_NEAR(full_propagate(H, f, t, {tol, 200000}).norm(), 1.0, 10 * tol) << t;
  EXPECT_GT(chebyshev_terms(H, 100.0), chebyshev_terms(H, 10.0));
  EXPECT_THROW(full_propagate(H, f, 1e6, {1e-10, 100}), AccuracyError);
}

TEST(WaveProbe, ZeroPotentialHasNoIncrements) {
  const LatticeBox box(2, 60);
  const auto f = unit_packet(box, 2.0);
  WaveProbeOptions opts;
  opts.tolerance = 1e-10;
  const auto r = wave_operator_probe(Potential(2), f, {2.0, 4.0, 6.0}, opts);
  for (const auto& s : r.steps) {
    EXPECT_LT(s.increment, 10 * opts.tolerance);
    EXPECT_NEAR(s.norm, 1.0, 10 * opts.tolerance);
  }
}

TEST(WaveProbe, RefusesGridsThatReachTheEdge) {
  const LatticeBox box(1, 30);
  const auto f = unit_packet(box, 2.0);
  EXPECT_THROW(wave_operator_probe(Potential(1), f, {1.0, 20.0}), GeometryError);
  LatticeField g = f;
  g.values() *= 2.0;
  EXPECT_THROW(wave_operator_probe(Potential(1), g, {1.0}), ConfigError);
  EXPECT_THROW(wave_operator_probe(Potential(1), f, {2.0, 1.0}), ConfigError);
  EXPECT_THROW(wave_operator_probe(Potential(1), LatticeField::delta(LatticeBox(1, 30, Boundary::dirichlet), Site{0}), {1.0}),
               ConfigError);
}

TEST(WaveProbe, IsometryAndStates) {
  const LatticeBox box(1, 200);
  std::map<Site, double> m;
  for (Coord k = 1; k * k * k <= 200; ++k) m[Site{k * k * k}] = 1.0;
  const auto f = unit_packet(box, 2.0);
  WaveProbeOptions opts;
  opts.keep_states = true;
  const auto r = wave_operator_probe(Potential(1, m), f, {5, 10, 20, 40}, opts);
  for (const auto& s : r.steps) {
    EXPECT_NEAR(s.norm, 1.0, 1e-9);
    EXPECT_NEAR(s.state.norm(), s.norm, 1e-15);
  }
  EXPECT_NEAR(r.steps[1].increment, (r.steps[1].state.values() - r.steps[0].state.values()).norm(), 1e-15);
}

TEST(WaveProbe, DenseDecayingPotentialDecaysSlowerThanSparse) {
  const LatticeBox box(1, 280);
  std::map<Site, double> sparse, dense;
  for (Coord k = 1; k * k * k <= 280; ++k) sparse[Site{k * k * k}] = 1.0;
  for (Coord n = -280; n <= 280; ++n) dense[Site{n}] = std::pow(1.0 + std::abs(static_cast<double>(n)), -0.25);
  const auto f = unit_packet(box, 2.0);
  const std::vector<double> times{10, 20, 30, 40, 50, 60};
  const auto a = wave_operator_probe(Potential(1, sparse), f, times);
  const auto b = wave_operator_probe(Potential(1, dense), f, times);
  const double ratio_sparse = a.steps.back().increment / a.steps.front().increment;
  const double ratio_dense = b.steps.back().increment / b.steps.front().increment;
  EXPECT_LT(ratio_sparse, ratio_dense);
}

TEST(LevelCurve, PointsLieOnTheCurveProperty) {
  for (int c = 0; c < 100; ++c) {
    auto g = engine(45, c);
    const double tau1 = c % 2 ? testing::uniform(g, 0.2, 3.5) : testing::uniform(g, 4.5, 7.8);
    const double theta = testing::uniform(g, -std::numbers::pi, std::numbers::pi);
    const auto p = level_point(tau1, theta);
    EXPECT_NEAR(symbol(p.xi), tau1, 1e-12);
    EXPECT_GT(p.omega, 0.0);
    EXPECT_GT(p.curvature, 0.0);
  }
}

TEST(LevelCurve, SmallLevelIsACircle) {
  // a(xi) ~ |xi|^2 near 0: radius sqrt(tau1), curvature 1/sqrt(tau1), omega = 1/2.
  const double tau1 = 1e-6;
  for (double theta : {0.0, 0.4, 2.0}) {
    const auto p = level_point(tau1, theta);
    EXPECT_NEAR(p.rho, 1e-3, 1e-9);
    EXPECT_NEAR(p.curvature, 1e3, 1e-2);
    EXPECT_NEAR(p.omega, 0.5, 1e-6);
  }
  EXPECT_THROW(level_point(4.0, 0.3), RegularityError);
}

TEST(QIntegral, ZeroFrequencyAndReflection) {
  QIntegralSpec spec;
  spec.js = {Site{8, 0}, Site{32, 0}, Site{128, 0}};
  EXPECT_GT(q_integral(spec, Site{0, 0}), 0.1);
  for (const Site& j : {Site{9, 4}, Site{-30, 7}, Site{64, 0}}) EXPECT_NEAR(q_integral(spec, j), q_integral(spec, -j), 1e-13);
}

TEST(QIntegral, PanelRefinementConverges) {
  QIntegralSpec spec;
  spec.js = {Site{8, 0}, Site{16, 0}, Site{128, 0}};
  QIntegralSpec fine = spec;
  fine.refinement = 2.0;
  for (const auto& j : spec.js) {
    const double a = q_integral(spec, j), b = q_integral(fine, j);
    EXPECT_LT(std::abs(a - b), 1e-6 * b) << j.str();
  }
}

TEST(QDecay, StationaryPhaseExponent) {
  QIntegralSpec spec;
  spec.js = {Site{8, 0}, Site{16, 0}, Site{32, 0}, Site{64, 0}, Site{128, 0}};
  const auto fit = q_decay_fit(spec);
  EXPECT_NEAR(fit.exponent, -0.5, 0.1);

  QIntegralSpec other = spec;
  other.profile = BumpProfile::cos_power;
  EXPECT_NEAR(q_decay_fit(other).exponent, fit.exponent, 0.05);

  QIntegralSpec wider = spec;
  wider.js = {Site{16, 0}, Site{32, 0}, Site{64, 0}, Site{128, 0}, Site{256, 0}};
  EXPECT_NEAR(q_decay_fit(wider).exponent, fit.exponent, 0.05);
}

TEST(QDecay, FitterSelfTestOnSyntheticData) {
  QIntegralSpec spec;
  spec.js = {Site{8, 0}, Site{16, 0}, Site{32, 0}, Site{64, 0}, Site{128, 0}};
  const auto fit = q_decay_fit(spec, [](const Site& j) { return 3.7 / j.norm(); });
  EXPECT_NEAR(fit.exponent, -1.0, 0.02);
  EXPECT_LT(fit.residual, 1e-12);
}

TEST(QDecay, RejectsDegenerateInputs) {
  QIntegralSpec spec;
  spec.js = {Site{8, 0}, Site{9, 0}, Site{10, 0}};
  EXPECT_THROW(q_decay_fit(spec), ConfigError);
  spec.js = {Site{0, 0}, Site{8, 0}, Site{128, 0}};
  EXPECT_THROW(q_decay_fit(spec), ConfigError);
  spec.js = {Site{8, 0}, Site{128, 0}};
  EXPECT_THROW(q_decay_fit(spec), ConfigError);
  spec.gauss_points_per_period = 10;
  EXPECT_THROW(spec.validate(), ConfigError);
}

}  // namespace
}  // namespace sparselab
