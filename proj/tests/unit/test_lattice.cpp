#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/lattice.hpp"

namespace sparselab {
namespace {

using testing::engine;

constexpr double pi = std::numbers::pi;

TEST(Symbol, ExtremesAndMidpoint) {
  const double zero[3] = {0, 0, 0};
  const double corner[3] = {pi, pi, pi};
  const double mid[2] = {pi / 2, pi / 2};
  EXPECT_DOUBLE_EQ(symbol(zero), 0.0);
  EXPECT_DOUBLE_EQ(symbol(corner), 12.0);
  EXPECT_NEAR(symbol(mid), 4.0, 1e-15);
  EXPECT_THROW(symbol(mid, 3), ConfigError);
}

TEST(Symbol, RangeProperty) {
  for (int c = 0; c < 500; ++c) {
    auto g = engine(11, c);
    const int d = static_cast<int>(testing::integer(g, 1, 3));
    std::vector<double> xi(static_cast<std::size_t>(d));
    for (auto& x : xi) x = testing::uniform(g, -pi, pi);
    const double a = symbol(xi);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 4.0 * d);
  }
}

TEST(FreeHamiltonian, ConstantFieldIsInKernelOnPeriodicBox) {
  const LatticeBox box(2, 4);
  LatticeField f(box);
  f.values().setConstant({1.5, -0.5});
  EXPECT_LT(apply_h0(f).norm(), 1e-14);
}

TEST(FreeHamiltonian, DeltaStencil) {
  const LatticeBox box(1, 10, Boundary::dirichlet);
  const auto h = apply_h0(LatticeField::delta(box, Site{0}));
  for (Coord x = -10; x <= 10; ++x) {
    const double expect = x == 0 ? 2.0 : std::abs(x) == 1 ? -1.0 : 0.0;
    EXPECT_EQ(h.at(Site{x}), std::complex<double>(expect, 0.0)) << x;
  }
}

TEST(FreeHamiltonian, PlaneWavesAreEigenvectors) {
  const LatticeBox box(2, 3);
  const Coord L = box.side();
  for (Coord k1 = 0; k1 < L; ++k1) {
    for (Coord k2 = 0; k2 < L; ++k2) {
      const double xi[2] = {2 * pi * k1 / L, 2 * pi * k2 / L};
      LatticeField w(box);
      for (std::size_t i = 0; i < box.size(); ++i) {
        const Site n = box.site(i);
        w.values()[static_cast<Eigen::Index>(i)] = std::polar(1.0, xi[0] * n[0] + xi[1] * n[1]);
      }
      const auto hw = apply_h0(w);
      EXPECT_LT((hw.values() - symbol(xi) * w.values()).norm(), 1e-12);
    }
  }
}

TEST(FreeHamiltonian, SelfAdjointAndLinearProperty) {
  for (int c = 0; c < 40; ++c) {
    auto g = engine(12, c);
    const int d = static_cast<int>(testing::integer(g, 1, 3));
    const LatticeBox box(d, testing::integer(g, 1, 4), c % 2 ? Boundary::periodic : Boundary::dirichlet);
    const auto V = testing::potential(g, box, 3, -2.0, 2.0);
    const auto u = testing::field(g, box);
    const auto v = testing::field(g, box);
    EXPECT_LT(std::abs(apply_h(u, V).inner(v) - u.inner(apply_h(v, V))), 1e-12);
    LatticeField w(box, 2.0 * u.values() - v.values());
    const Eigen::VectorXcd lhs = apply_h(w, V).values();
    const Eigen::VectorXcd rhs = 2.0 * apply_h(u, V).values() - apply_h(v, V).values();
    EXPECT_LT((lhs - rhs).norm(), 1e-12);
  }
}

TEST(Hamiltonian, ZeroPotentialAndSingleBump) {
  const LatticeBox box(2, 3, Boundary::dirichlet);
  auto g = engine(13, 0);
  const auto u = testing::field(g, box);
  EXPECT_EQ(apply_h(u, Potential(2)).values(), apply_h0(u).values());
  const auto d0 = LatticeField::delta(box, Site::origin(2));
  auto expect = apply_h0(d0);
  expect.at(Site::origin(2)) += -0.7;
  EXPECT_EQ(apply_h(d0, Potential(2, {{Site::origin(2), -0.7}})).values(), expect.values());
}

TEST(SparseSupport, SquaresOnTheAxis) {
  const auto s = sparse_support({SparseFamily::power_axis, 1, 2.0, 1, false, 0, {}}, 100);
  ASSERT_EQ(s.sites.size(), 10u);
  for (Coord k = 1; k <= 10; ++k) EXPECT_EQ(s.sites[static_cast<std::size_t>(k - 1)], Site{k * k});
  EXPECT_DOUBLE_EQ(s.separation.back(), 19.0);
}

TEST(SparseSupport, CollisionsAreRejected) {
  EXPECT_THROW(sparse_support({SparseFamily::power_axis, 1, 2.0, 0, true, 0, {}}, 50), ConfigError);
  EXPECT_THROW(sparse_support({SparseFamily::power_axis, 1, 1.0, 1, false, 0, {}}, 50), ConfigError);
}

TEST(SparseSupport, TwoPointSeparation) {
  const Potential V(1, {{Site{0}, 1.0}, {Site{5}, 1.0}});
  EXPECT_DOUBLE_EQ(V.separation(Site{0}), 5.0);
  EXPECT_DOUBLE_EQ(V.separation(Site{5}), 5.0);
}

TEST(SparseSupport, SeparationMatchesBruteForceProperty) {
  const SparseFamily families[] = {SparseFamily::power_axis, SparseFamily::power_shells};
  for (int c = 0; c < 30; ++c) {
    auto g = engine(14, c);
    SparseRule rule;
    rule.dim = static_cast<int>(testing::integer(g, 1, 3));
    rule.family = families[c % 2];
    rule.exponent = testing::uniform(g, 1.2, 3.0);
    rule.k_min = testing::integer(g, 1, 3);
    rule.mirrored = c % 3 == 0;
    const auto s = sparse_support(rule, testing::integer(g, 30, 400));
    for (std::size_t i = 0; i < s.sites.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < s.sites.size(); ++j) {
        if (i != j) best = std::min(best, distance(s.sites[i], s.sites[j]));
      }
      EXPECT_EQ(s.separation[i], best);
    }
  }
}

TEST(SparseSupport, RatioGrowsForSquares) {
  const SparseRule rule{SparseFamily::power_axis, 1, 2.0, 1, false, 0, {}};
  double prev = 0.0;
  for (Coord R : {100, 1000, 10000}) {
    const double r = tail_sparseness_ratio(sparse_support(rule, R), 0.4, R);
    EXPECT_GT(r, prev) << R;
    prev = r;
  }
}

TEST(PowerRule, ExactForIntegralExponents) {
  EXPECT_EQ(power_rule_radius(7, 2.0), 49);
  EXPECT_EQ(power_rule_radius(100000, 3.0), 1000000000000000LL);
  EXPECT_EQ(power_rule_radius(3, 1.5), 6);
}

TEST(SamplePotential, EmptySupportAndDeterminism) {
  EXPECT_TRUE(sample_potential(2, {}, 1.0, 3).empty());
  const auto s = sparse_support({SparseFamily::power_shells, 2, 2.0, 1, false, 0, {}}, 400);
  const auto a = sample_potential(2, s.sites, 2.0, 99);
  const auto b = sample_potential(2, s.sites, 2.0, 99);
  EXPECT_EQ(a.entries(), b.entries());
  EXPECT_NE(a.entries(), sample_potential(2, s.sites, 2.0, 100).entries());
}

TEST(SamplePotential, UniformMoments) {
  std::vector<Site> sites;
  for (Coord k = 1; k <= 100000; ++k) sites.push_back(Site{k});
  const auto V = sample_potential(1, sites, 2.0, 5);
  double sum = 0.0;
  for (const auto& [n, v] : V.entries()) {
    EXPECT_GE(v, -2.0);
    EXPECT_LE(v, 0.0);
    sum += v;
  }
  const double mean = sum / 1e5;
  EXPECT_LT(std::abs(mean + 1.0), 3.0 * (2.0 / std::sqrt(12.0)) / std::sqrt(1e5));
}

TEST(PartialSums, ZeroBoundedAndDivergent) {
  const std::vector<double> radii{10, 100, 1000};
  for (double s : weighted_partial_sums(Potential(2), radii)) EXPECT_EQ(s, 0.0);

  std::vector<Site> axis;
  for (Coord k = 1; k * k <= 1000; ++k) axis.push_back(Site{k * k, 0, 0});
  const auto bounded = weighted_partial_sums(constant_potential(3, axis, 1.0), radii);
  EXPECT_LT(bounded.back(), pi * pi / 6);
  EXPECT_NEAR(bounded.back(), 1.6131907003279242, 1e-12);  // sum_{k<=31} 1/k^2

  std::vector<Site> line;
  for (Coord n = 1; n <= 1000; ++n) line.push_back(Site{n});
  const auto dense = weighted_partial_sums(constant_potential(1, line, 1.0), radii);
  EXPECT_DOUBLE_EQ(dense[0], 10.0);
  EXPECT_DOUBLE_EQ(dense[2], 1000.0);
}

TEST(PartialSums, MonotoneInRadiusProperty) {
  for (int c = 0; c < 30; ++c) {
    auto g = engine(15, c);
    const LatticeBox box(static_cast<int>(testing::integer(g, 1, 3)), 30);
    const auto V = testing::potential(g, box, 40, -3.0, 3.0);
    std::vector<double> radii;
    for (double r = 1; r < 60; r += testing::uniform(g, 0.5, 5.0)) radii.push_back(r);
    const auto s = weighted_partial_sums(V, radii);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i], s[i - 1]);
  }
}

TEST(Box, IndexRoundTripProperty) {
  for (int c = 0; c < 20; ++c) {
    auto g = engine(16, c);
    const LatticeBox box(static_cast<int>(testing::integer(g, 1, 3)), testing::integer(g, 0, 5));
    for (std::size_t i = 0; i < box.size(); ++i) EXPECT_EQ(box.index(box.site(i)), i);
    EXPECT_THROW(box.index(Site::on_axis(box.dim(), 0, box.radius() + 1)), ConfigError);
  }
}

TEST(Potential, TranslationAndRestriction) {
  const Potential V(2, {{Site{3, 4}, -1.0}, {Site{10, 0}, 2.0}, {Site{0, 1}, 0.0}});
  EXPECT_EQ(V.size(), 2u);
  const auto W = V.translated(Site{3, 4});
  EXPECT_EQ(W(Site{0, 0}), -1.0);
  EXPECT_EQ(W(Site{7, -4}), 2.0);
  EXPECT_EQ(V.restricted(LatticeBox(2, 5)).size(), 1u);
  EXPECT_THROW(Potential(1, {{Site{0}, std::nan("")}}), ConfigError);
}

}  // namespace
}  // namespace sparselab
