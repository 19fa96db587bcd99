// One PASS/FAIL line per acceptance criterion. Tolerances and seeds are fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/SparseLU>

#include "sparselab/eigensolve.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/green.hpp"
#include "sparselab/localization.hpp"
#include "sparselab/oscillatory.hpp"
#include "sparselab/propagate.hpp"
#include "sparselab/wave_probe.hpp"

using namespace sparselab;

namespace {

constexpr std::uint64_t seed = 1;

struct Outcome {
  bool ok = false;
  std::string detail;
};

int threads() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

LatticeField packet(const LatticeBox& box, double width) {
  LatticeField f(box);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double r = box.site(i).norm();
    f.values()[static_cast<Eigen::Index>(i)] = std::exp(-r * r / (2 * width * width));
  }
  f.values() /= f.norm();
  return f;
}

Outcome green_oracle() {
  const GreenKernel g(1);
  double worst = 0.0;
  for (double lambda : {-0.1, -1.0, -10.0}) {
    const double A = 2.0 - lambda, s = std::sqrt(A * A - 4.0), r = (A - s) / 2.0;
    for (Coord n = -20; n <= 20; ++n) {
      const double exact = std::pow(r, static_cast<double>(std::abs(n))) / s;
      worst = std::max(worst, std::abs(g(lambda, Site{n}) - exact));
    }
  }
  return {worst <= 1e-10, "max error " + fmt(worst)};
}

Outcome decay_rate() {
  const double expect = std::log(2.0 / (3.0 - std::sqrt(5.0)));
  const auto f1 = green_decay_fit(GreenKernel(1), -1.0, Site{1}, 20);
  const auto f2 = green_decay_fit(GreenKernel(2), -1.0, Site{1, 0}, 10);
  const double rel = std::abs(f1.gamma - expect) / expect;
  return {rel < 0.02 && f2.residual < 1e-3,
          "gamma " + fmt(f1.gamma) + " (rel " + fmt(rel) + "), d=2 residual " + fmt(f2.residual)};
}

Outcome impurity() {
  const auto lvl = impurity_level(1, -1.0);
  const double closed = 2.0 - std::sqrt(5.0);
  const BoxOperator H(LatticeBox(1, 400, Boundary::dirichlet), Potential(1, {{Site{0}, -1.0}}));
  const auto low = eigs_in_window(H, {-10.0, 0.0}, 1);
  if (low.empty()) return {false, "box has no eigenvalue below 0"};
  const double e1 = std::abs(lvl.lambda - closed), e2 = std::abs(lvl.lambda - low[0].value);
  return {e1 <= 1e-10 && e2 <= 1e-6, "root " + fmt(lvl.lambda) + ", |closed| " + fmt(e1) + ", |box| " + fmt(e2)};
}

Outcome coupling_bound_holds() {
  const double a = spectrum_fill_amplitude(1, -1.0);
  const SparseRule rule{SparseFamily::power_axis, 1, 2.0, 1, false, 0, {}};
  const auto r = spectrum_fill_scan(-1.0, rule, 2000, 20, seed, threads());
  const bool ok = std::abs(a - std::sqrt(5.0)) <= 1e-10 && r.infimum >= -1.0 - 1e-8;
  return {ok, "a " + fmt(a) + ", infimum " + fmt(r.infimum) + " over " + std::to_string(r.realizations) + " realizations"};
}

Outcome stationary_phase() {
  QIntegralSpec spec;
  spec.js = {Site{8, 0}, Site{16, 0}, Site{32, 0}, Site{64, 0}, Site{128, 0}};
  const auto fit = q_decay_fit(spec);
  const auto synth = q_decay_fit(spec, [](const Site& j) { return 1.0 / j.norm(); });
  const bool ok = std::abs(fit.exponent + 0.5) <= 0.1 && std::abs(synth.exponent + 1.0) <= 0.02;
  return {ok, "exponent " + fmt(fit.exponent) + ", synthetic " + fmt(synth.exponent)};
}

Outcome wave_operator() {
  // Unit bumps at k^3 on the first axis: sum |V(n)| |n|^{-1/2} = sum k^{-3/2} converges.
  const LatticeBox box(2, 270);
  std::map<Site, double> m;
  for (Coord k = 1; k * k * k <= 270; ++k) m[Site{k * k * k, 0}] = 1.0;
  std::vector<double> times;
  for (int k = 1; k <= 12; ++k) times.push_back(5.0 * k);
  const auto f = packet(box, 2.0);
  WaveProbeOptions opts;
  const auto r = wave_operator_probe(Potential(2, m), f, times, opts);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    if (r.steps[i].increment > r.steps[peak].increment) peak = i;
  }
  bool monotone = true;
  for (std::size_t i = peak + 1; i < r.steps.size(); ++i) monotone = monotone && r.steps[i].increment <= r.steps[i - 1].increment;
  const double ratio = r.steps.back().increment / r.steps.front().increment;

  const LatticeBox small(2, 100);
  const auto free = wave_operator_probe(Potential(2), packet(small, 2.0), {5.0, 10.0, 15.0, 20.0}, opts);
  double free_max = 0.0;
  for (const auto& s : free.steps) free_max = std::max(free_max, s.increment);
  const bool ok = monotone && ratio < 0.1 && free_max < 10 * opts.tolerance;
  return {ok, "final/first " + fmt(ratio) + (monotone ? ", monotone after peak" : ", not monotone") + ", V=0 max " +
                  fmt(free_max)};
}

Outcome simon_wolff_oracle() {
  double psi_err = 0.0, flag_err = 0.0;
  bool counts = true;
  struct Cluster {
    int d;
    Potential V;
    Coord big;
  };
  const std::vector<Cluster> clusters{
      {1, Potential(1, {{Site{-6}, -1.2}, {Site{0}, -2.0}, {Site{3}, -0.8}, {Site{9}, -1.5}}), 200},
      {2, Potential(2, {{Site{0, 0}, -2.5}, {Site{2, -1}, -1.0}, {Site{-3, 2}, -1.8}}), 40}};
  for (const auto& c : clusters) {
    const GreenKernel kernel(c.d);
    const SupportIndex S(c.V);
    const LatticeBox box(c.d, c.big, Boundary::dirichlet);
    const BoxOperator H(box, c.V);
    const Interval window{-5.0, -0.5};
    const auto pairs = eigs_in_window(H, window, 100);
    const auto flags = eigenvalue_candidates(kernel, c.V, S, window, 2000);
    counts = counts && pairs.size() == flags.size();
    for (std::size_t i = 0; i < std::min(pairs.size(), flags.size()); ++i) {
      flag_err = std::max(flag_err, std::abs(pairs[i].value - flags[i].lambda));
    }
    for (double lambda : {-0.7, -1.3, -2.6}) {
      if (std::any_of(pairs.begin(), pairs.end(), [&](const EigenPair& p) { return std::abs(p.value - lambda) < 1e-3; })) continue;
      Eigen::SparseMatrix<double> B = H.sparse();
      for (Eigen::Index i = 0; i < B.rows(); ++i) B.coeffRef(i, i) -= lambda;
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(B);
      for (std::size_t j = 0; j < S.size(); ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(B.rows());
        e[static_cast<Eigen::Index>(box.index(S.site(j)))] = 1.0;
        const Eigen::VectorXd oracle = lu.solve(e);
        const auto psi = resolve_on_support(kernel, lambda, S.site(j), c.V, S);
        for (std::size_t l = 0; l < S.size(); ++l) {
          psi_err = std::max(psi_err, std::abs(psi[static_cast<Eigen::Index>(l)] -
                                               oracle[static_cast<Eigen::Index>(box.index(S.site(l)))]));
        }
      }
    }
  }
  return {counts && psi_err <= 1e-6 && flag_err <= 1e-4,
          "psi error " + fmt(psi_err) + ", flag error " + fmt(flag_err) + (counts ? "" : ", flag count mismatch")};
}

Outcome borel_cantelli() {
  const GreenKernel g(1);
  std::vector<double> grid;
  for (int i = 0; i <= 20000; ++i) grid.push_back(-12.0 + 11.5 * i / 20000.0);
  const std::vector<Site> sites{Site{10}, Site{20}, Site{40}};
  std::vector<std::map<Site, double>> cases{{{Site{10}, -0.7}, {Site{20}, -1.3}, {Site{40}, -0.4}}};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-6.0, -0.1);
  for (int c = 0; c < 20; ++c) cases.push_back({{Site{10}, amp(rng)}, {Site{20}, amp(rng)}, {Site{40}, amp(rng)}});
  double worst = -1e300;
  std::size_t hits = 0;
  for (const auto& m : cases) {
    const auto r = one_plus_gv_scan(g, Potential(1, m), 0.5, grid, sites);
    for (const auto& e : r.entries) {
      worst = std::max(worst, e.measure - e.bound - r.spacing);
      hits += e.hits;
    }
  }
  return {worst <= 0.0, "max(measure - bound - spacing) " + fmt(worst) + ", " + std::to_string(hits) + " grid hits"};
}

Outcome measure_convergence() {
  std::map<Site, double> m;
  for (Coord k = 2; k * k <= 5000; ++k) m[Site{k * k}] = -1.0 + 1.0 / static_cast<double>(k);
  std::vector<Site> far;
  for (Coord k : {4, 8, 16, 32, 64}) far.push_back(Site{k * k});
  const auto r = bump_measure_compare(Potential(1, m), far, -1.0, {{0.0, 1.0}, {-0.5, 0.5}}, 40, 5000);
  std::string seq;
  for (const auto& row : r.rows) seq += (seq.empty() ? "" : " ") + fmt(row.sup_difference);
  return {r.strictly_decreasing, "sup differences " + seq};
}

Outcome localization_statistics() {
  const SparseRule rule{SparseFamily::power_axis, 1, 2.0, 1, false, 0, {}};
  const auto small = spectrum_fill_scan(-1.0, rule, 500, 20, seed, threads());
  const auto large = spectrum_fill_scan(-1.0, rule, 2000, 20, seed, threads());
  // "Does not grow" allows 10% realization noise in the median.
  const bool ok = large.largest_gap < small.largest_gap && large.median_participation < 50.0 &&
                  large.median_participation <= 1.1 * small.median_participation;
  return {ok, "gap " + fmt(small.largest_gap) + " -> " + fmt(large.largest_gap) + ", median PR " +
                  fmt(small.median_participation) + " -> " + fmt(large.median_participation)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "green oracle", 1.0, green_oracle},
      {2, "decay rate", 10.0, decay_rate},
      {3, "impurity level", 30.0, impurity},
      {4, "coupling bound", 600.0, coupling_bound_holds},
      {5, "stationary phase exponent", 300.0, stationary_phase},
      {6, "wave operator probe", 600.0, wave_operator},
      {7, "simon-wolff oracle", 120.0, simon_wolff_oracle},
      {8, "one-plus-gv bound", 60.0, borel_cantelli},
      {9, "measure convergence", 300.0, measure_convergence},
      {10, "localization statistics", 900.0, localization_statistics},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.ok && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %-26s %s  %8.2fs / %.0fs  %s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                c.limit_seconds, o.detail.c_str(), in_time ? "" : " (over time limit)");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
