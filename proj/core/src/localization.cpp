#include "sparselab/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

#include "sparselab/eigensolve.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/random.hpp"
#include "sparselab/resolvent.hpp"
#include "parallel.hpp"

namespace sparselab {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double green_real(const GreenKernel& green, double lambda, const Site& n) { return green(lambda, n).real(); }

Eigen::VectorXd free_column(const GreenKernel& green, double lambda, const Site& j, const SupportIndex& support) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) g[static_cast<Eigen::Index>(i)] = green_real(green, lambda, support.site(i) - j);
  return g;
}

// psi(n) = G(n - j) - sum_l G(n - l) V(l) psi(l) at every site of the box.
Eigen::VectorXd reconstruct(const GreenKernel& green, double lambda, const Site& j, const LatticeBox& box,
                            const SupportIndex& support, const Eigen::VectorXd& values, const Eigen::VectorXd& psi_s) {
  Eigen::VectorXd psi(static_cast<Eigen::Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site n = box.site(i);
    double v = green_real(green, lambda, n - j);
    for (std::size_t l = 0; l < support.size(); ++l) {
      v -= green_real(green, lambda, n - support.site(l)) * values[static_cast<Eigen::Index>(l)] *
           psi_s[static_cast<Eigen::Index>(l)];
    }
    psi[static_cast<Eigen::Index>(i)] = v;
  }
  return psi;
}

}  // namespace

SupportIndex::SupportIndex(const Potential& V) : sites_(V.support()) {
  for (std::size_t i = 0; i < sites_.size(); ++i) lookup_.emplace(sites_[i], i);
}

SupportIndex::SupportIndex(const Potential& V, const LatticeBox& box) : SupportIndex(V.restricted(box)) {}

std::optional<std::size_t> SupportIndex::find(const Site& n) const {
  if (auto it = lookup_.find(n); it != lookup_.end()) return it->second;
  return std::nullopt;
}

double alpha_coeff(const GreenKernel& green, double lambda, const Site& n, const Potential& V,
                   const LocalizationOptions& options) {
  require_outside_band(green.dim(), lambda, options.eps);
  const double denom = 1.0 + green_real(green, lambda, Site::origin(green.dim())) * V(n);
  if (!(std::abs(denom) >= options.resonance_threshold)) {
    throw ResonanceError("alpha_coeff: 1 + G(lambda;0) V(n) = " + std::to_string(denom) + " at n = " + n.str() +
                         ", lambda = " + std::to_string(lambda));
  }
  return 1.0 / denom;
}

TKernel build_T(const GreenKernel& green, double lambda, const Potential& V, const SupportIndex& support,
                const LocalizationOptions& options) {
  const auto S = static_cast<Eigen::Index>(support.size());
  TKernel T;
  T.lambda = lambda;
  T.alpha.resize(S);
  T.values.resize(S);
  for (Eigen::Index i = 0; i < S; ++i) {
    const Site& n = support.site(static_cast<std::size_t>(i));
    T.values[i] = V(n);
    T.alpha[i] = alpha_coeff(green, lambda, n, V, options);
  }
  T.matrix = Eigen::MatrixXd::Zero(S, S);
  for (Eigen::Index i = 0; i < S; ++i) {
    for (Eigen::Index l = 0; l < S; ++l) {
      if (l == i) continue;
      const Site diff = support.site(static_cast<std::size_t>(i)) - support.site(static_cast<std::size_t>(l));
      T.matrix(i, l) = T.alpha[i] * green_real(green, lambda, diff) * T.values[l];
    }
  }
  return T;
}

double schur_bound_direct(const Eigen::MatrixXd& T) {
  if (T.size() == 0) return 0.0;
  const Eigen::MatrixXd A = T.cwiseAbs();
  return std::sqrt(A.rowwise().sum().maxCoeff() * A.colwise().sum().maxCoeff());
}

double schur_bound_exponential(const TKernel& T, const SupportIndex& support, const DecayEnvelope& envelope) {
  const auto S = static_cast<Eigen::Index>(support.size());
  if (S == 0) return 0.0;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(S, S);
  for (Eigen::Index i = 0; i < S; ++i) {
    for (Eigen::Index l = 0; l < S; ++l) {
      if (l == i) continue;
      const double r = distance(support.site(static_cast<std::size_t>(i)), support.site(static_cast<std::size_t>(l)));
      K(i, l) = std::abs(T.alpha[i]) * envelope.bound(r) * std::abs(T.values[l]);
    }
  }
  return schur_bound_direct(K);
}

Eigen::MatrixXd birman_schwinger(const GreenKernel& green, double lambda, const Potential& V,
                                 const SupportIndex& support) {
  const auto S = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(S, S);
  for (Eigen::Index i = 0; i < S; ++i) {
    for (Eigen::Index l = 0; l < S; ++l) {
      const Site& nl = support.site(static_cast<std::size_t>(l));
      M(i, l) += green_real(green, lambda, support.site(static_cast<std::size_t>(i)) - nl) * V(nl);
    }
  }
  return M;
}

double smallest_singular_value(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 1.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues().minCoeff();
}

Eigen::VectorXd resolve_on_support(const GreenKernel& green, double lambda, const Site& j, const Potential& V,
                                   const SupportIndex& support) {
  if (support.size() == 0) return {};
  const Eigen::MatrixXd M = birman_schwinger(green, lambda, V, support);
  return M.fullPivLu().solve(free_column(green, lambda, j, support));
}

std::string to_string(SimonWolffVerdict v) {
  switch (v) {
    case SimonWolffVerdict::summable: return "summable";
    case SimonWolffVerdict::near_eigenvalue: return "near-eigenvalue";
    case SimonWolffVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

SimonWolffReport simon_wolff_resolve(const GreenKernel& green, double lambda, const Site& j, const Potential& V,
                                     const std::vector<Coord>& radii, const LocalizationOptions& options) {
  const int d = green.dim();
  require_outside_band(d, lambda, options.eps);
  if (V.dim() != d || j.dim() != d) throw ConfigError("simon_wolff_resolve: dimension mismatch");
  if (radii.empty()) throw ConfigError("simon_wolff_resolve: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0 || (i > 0 && radii[i] <= radii[i - 1])) {
      throw ConfigError("simon_wolff_resolve: radii must be nonnegative and strictly increasing");
    }
  }

  SimonWolffReport report;
  report.lambda = lambda;
  Coord previous_radius = -1;
  double previous_norm = nan;
  for (Coord R : radii) {
    const LatticeBox box(d, R, Boundary::dirichlet);
    const SupportIndex support(V, box);
    SimonWolffStep step;
    step.radius = R;
    step.support_size = support.size();

    const Eigen::MatrixXd M = birman_schwinger(green, lambda, V, support);
    step.sigma_min = smallest_singular_value(M);
    const Eigen::VectorXd rhs_free = free_column(green, lambda, j, support);
    Eigen::VectorXd psi_s;
    bool resonance = false;
    try {
      const TKernel T = build_T(green, lambda, V, support, options);
      const auto S = T.matrix.rows();
      const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(S, S) + T.matrix;
      step.sigma_min_t = smallest_singular_value(A);
      const Eigen::VectorXd rhs = T.alpha.cwiseProduct(rhs_free);  // psi_0 tilde
      psi_s = S > 0 ? Eigen::VectorXd(A.fullPivLu().solve(rhs)) : Eigen::VectorXd();
    } catch (const ResonanceError&) {
      resonance = true;
      step.sigma_min_t = nan;
      psi_s = M.fullPivLu().solve(rhs_free);
    }

    Eigen::VectorXd values(static_cast<Eigen::Index>(support.size()));
    for (std::size_t l = 0; l < support.size(); ++l) values[static_cast<Eigen::Index>(l)] = V(support.site(l));
    const Eigen::VectorXd psi = reconstruct(green, lambda, j, box, support, values, psi_s);
    step.psi_norm = psi.norm();
    double tail = 0.0;
    for (std::size_t l = 0; l < support.size(); ++l) {
      if (support.site(l).norm_inf() > previous_radius) tail += psi_s[static_cast<Eigen::Index>(l)] * psi_s[static_cast<Eigen::Index>(l)];
    }
    step.tail_norm = std::sqrt(tail);
    step.relative_change = std::isnan(previous_norm) ? nan : std::abs(step.psi_norm - previous_norm) / step.psi_norm;

    if (resonance || step.sigma_min < options.near_eigen_threshold) {
      step.verdict = SimonWolffVerdict::near_eigenvalue;
    } else if (!std::isnan(step.relative_change) && step.relative_change < options.summable_threshold) {
      step.verdict = SimonWolffVerdict::summable;
    } else {
      step.verdict = SimonWolffVerdict::inconclusive;
    }
    previous_radius = R;
    previous_norm = step.psi_norm;
    report.steps.push_back(step);
  }
  report.verdict = report.steps.back().verdict;
  return report;
}

std::vector<EigenCandidate> eigenvalue_candidates(const GreenKernel& green, const Potential& V,
                                                  const SupportIndex& support, Interval window, int grid_points,
                                                  const LocalizationOptions& options) {
  if (grid_points < 3) throw ConfigError("eigenvalue_candidates: need at least three grid points");
  if (!(window.lo < window.hi)) throw ConfigError("eigenvalue_candidates: empty window");
  require_outside_band(green.dim(), window.lo, options.eps);
  require_outside_band(green.dim(), window.hi, options.eps);
  if (window.lo < 0.0 && window.hi > 0.0) throw SpectralParameterError("eigenvalue_candidates: window straddles the band");

  auto sigma = [&](double lambda) { return smallest_singular_value(birman_schwinger(green, lambda, V, support)); };
  const double h = window.width() / (grid_points - 1);
  std::vector<double> grid(static_cast<std::size_t>(grid_points)), s(grid.size());
  for (int i = 0; i < grid_points; ++i) {
    grid[static_cast<std::size_t>(i)] = i + 1 == grid_points ? window.hi : window.lo + i * h;
    s[static_cast<std::size_t>(i)] = sigma(grid[static_cast<std::size_t>(i)]);
  }

  std::vector<EigenCandidate> out;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool left_ok = i == 0 || s[i] <= s[i - 1];
    const bool right_ok = i + 1 == grid.size() || s[i] < s[i + 1];
    if (!(left_ok && right_ok)) continue;
    double a = grid[i == 0 ? 0 : i - 1];
    double b = grid[i + 1 == grid.size() ? i : i + 1];
    double c = b - inv_phi * (b - a);
    double e = a + inv_phi * (b - a);
    double fc = sigma(c), fe = sigma(e);
    while (b - a > 1e-13 * std::max(1.0, std::abs(a))) {
      if (fc < fe) {
        b = e;
        e = c;
        fe = fc;
        c = b - inv_phi * (b - a);
        fc = sigma(c);
      } else {
        a = c;
        c = e;
        fc = fe;
        e = a + inv_phi * (b - a);
        fe = sigma(e);
      }
    }
    const double lam = fc < fe ? c : e;
    const double val = std::min(fc, fe);
    if (val < options.near_eigen_threshold) out.push_back({lam, val});
  }
  return out;
}

OnePlusGvReport one_plus_gv_scan(const GreenKernel& green, const Potential& V, double eps,
                                 const std::vector<double>& lambda_grid, const std::vector<Site>& sites) {
  const int d = green.dim();
  if (!(eps > 0.0)) throw ConfigError("one_plus_gv_scan: eps must be positive");
  if (lambda_grid.size() < 2) throw ConfigError("one_plus_gv_scan: grid needs at least two points");
  const double spacing = (lambda_grid.back() - lambda_grid.front()) / static_cast<double>(lambda_grid.size() - 1);
  if (!(spacing > 0.0)) throw ConfigError("one_plus_gv_scan: grid must be increasing");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lam = lambda_grid[i];
    if (lam > -eps && lam < 4.0 * d + eps) {
      throw SpectralParameterError("one_plus_gv_scan: grid point " + std::to_string(lam) + " inside (-eps, 4d + eps)");
    }
    if (i > 0 && std::abs(lam - lambda_grid[i - 1] - spacing) > 1e-9 * spacing) {
      throw ConfigError("one_plus_gv_scan: grid is not uniformly spaced");
    }
  }

  std::vector<double> g0(lambda_grid.size());
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) g0[i] = green_real(green, lambda_grid[i], Site::origin(d));

  OnePlusGvReport report;
  report.spacing = spacing;
  const double vmax = V.sup_norm();
  for (const auto& n : sites) {
    if (n.dim() != d) throw ConfigError("one_plus_gv_scan: site dimension mismatch");
    if (n.norm() == 0.0) throw ConfigError("one_plus_gv_scan: n = 0 has no threshold |n|^{-d-eps}");
    OnePlusGvEntry e;
    e.site = n;
    e.value = V(n);
    e.threshold = std::pow(n.norm(), -d - eps);
    e.bound = vmax * vmax * e.threshold / eps;
    for (double g : g0) {
      if (std::abs(1.0 + g * e.value) < e.threshold) ++e.hits;
    }
    e.measure = static_cast<double>(e.hits) * spacing;
    e.resolution_warning = spacing > e.threshold;
    report.entries.push_back(e);
  }
  return report;
}

ImpurityLevel impurity_level(int dim, double beta, ImpurityOptions options) {
  if (!(beta < 0.0)) throw ConfigError("impurity_level: beta must be negative");
  auto f = [&](double lambda) {
    return 1.0 + beta * green_onsite(dim, lambda, options.green_tolerance);
  };

  double lo = -std::abs(beta) - 4.0 * dim;
  double flo = f(lo);
  if (!(flo > 0.0)) throw AccuracyError("impurity_level: f is not positive at the lower bracket");
  double hi = 0.0, fhi = 0.0;
  bool bracketed = false;
  for (double step = 1e-1; step >= 1e-10 * 0.999; step /= 10.0) {
    hi = -step;
    fhi = f(hi);
    if (fhi < 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
    flo = fhi;
  }
  if (!bracketed) {
    throw NoBoundStateError("impurity_level: 1 + beta G(lambda; 0) keeps its sign on (" +
                            std::to_string(-std::abs(beta) - 4.0 * dim) + ", " + std::to_string(lo) +
                            "] for beta = " + std::to_string(beta) + " in d = " + std::to_string(dim));
  }

  // Illinois false position, with bisection whenever it stalls.
  int side = 0;
  ImpurityLevel out;
  for (int it = 0; it < options.max_iterations; ++it) {
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double fx = f(x);
    out.lambda = x;
    out.residual = fx;
    out.iterations = it + 1;
    if (std::abs(fx) <= options.residual_tol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
      if (!(x < 0.0)) throw NoBoundStateError("impurity_level: root is not strictly negative");
      if (std::abs(fx) > options.residual_tol) {
        throw AccuracyError("impurity_level: bracket collapsed with residual " + std::to_string(fx));
      }
      return out;
    }
    if (fx > 0.0) {
      lo = x;
      flo = fx;
      if (side == 1) fhi *= 0.5;
      side = 1;
    } else {
      hi = x;
      fhi = fx;
      if (side == -1) flo *= 0.5;
      side = -1;
    }
  }
  throw AccuracyError("impurity_level: no convergence after " + std::to_string(options.max_iterations) +
                      " iterations, residual " + std::to_string(out.residual));
}

BumpMeasureReport bump_measure_compare(const Potential& V, const std::vector<Site>& far_sites, double beta,
                                       const std::vector<std::complex<double>>& z_list, Coord local_radius,
                                       Coord global_radius) {
  const int d = V.dim();
  if (z_list.empty()) throw ConfigError("bump_measure_compare: empty z list");
  for (const auto& z : z_list) {
    if (!(z.imag() > 0.0)) throw ConfigError("bump_measure_compare: every z needs Im z > 0");
  }
  if (local_radius < 1) throw ConfigError("bump_measure_compare: local radius must be >= 1");

  const LatticeBox box(d, local_radius, Boundary::dirichlet);
  const LatticeField chi0 = LatticeField::delta(box, Site::origin(d));
  const BoxOperator reference_op(box, Potential(d, {{Site::origin(d), beta}}));
  BumpMeasureReport report;
  report.local_radius = local_radius;
  for (const auto& z : z_list) report.reference.push_back(stieltjes(reference_op, chi0, z));

  for (const auto& n : far_sites) {
    if (n.dim() != d) throw ConfigError("bump_measure_compare: site dimension mismatch");
    if (V(n) == 0.0) throw ConfigError("bump_measure_compare: far site " + n.str() + " is not in supp V");
    if (n.norm_inf() + local_radius > global_radius) {
      throw GeometryError("bump_measure_compare: box of radius " + std::to_string(local_radius) + " around " +
                          n.str() + " leaves the global box of radius " + std::to_string(global_radius));
    }
    const BoxOperator H(box, V.translated(n));
    BumpMeasureRow row;
    row.site = n;
    row.amplitude = V(n);
    for (std::size_t i = 0; i < z_list.size(); ++i) {
      const auto m = stieltjes(H, chi0, z_list[i]);
      const auto mc = stieltjes(H, chi0, std::conj(z_list[i]));
      row.m.push_back(m);
      row.sup_difference = std::max(row.sup_difference, std::abs(m - report.reference[i]));
      row.conjugate_defect = std::max(row.conjugate_defect, std::abs(mc - std::conj(m)));
    }
    report.rows.push_back(std::move(row));
  }
  report.strictly_decreasing = !report.rows.empty();
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (!(report.rows[i].sup_difference < report.rows[i - 1].sup_difference)) report.strictly_decreasing = false;
  }
  return report;
}

double spectrum_fill_amplitude(int dim, double lambda0) { return coupling_bound(GreenKernel(dim), lambda0); }

SpectrumFillReport spectrum_fill_scan(double lambda0, const SparseRule& rule, Coord radius, int realizations,
                                      std::uint64_t seed, int threads, double amplitude) {
  if (!(lambda0 < 0.0)) throw ConfigError("spectrum_fill_scan: lambda0 must be negative");
  if (realizations < 0) throw ConfigError("spectrum_fill_scan: realizations must be >= 0");
  const int d = rule.dim;
  SpectrumFillReport report;
  report.lambda0 = lambda0;
  report.radius = radius;
  report.realizations = realizations;
  report.a = amplitude > 0.0 ? amplitude : spectrum_fill_amplitude(d, lambda0);
  report.infimum = std::numeric_limits<double>::infinity();

  const auto support = sparse_support(rule, radius);
  const LatticeBox box(d, radius, Boundary::dirichlet);

  struct Slot {
    std::vector<double> values, participation;
    double infimum = std::numeric_limits<double>::infinity();
    std::size_t below = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(realizations));
  detail::parallel_for(realizations, threads, [&](int r) {
    const Potential V = sample_potential(d, support.sites, report.a, derive_seed(seed, static_cast<std::uint64_t>(r)));
    const BoxOperator H(box, V);
    const Interval window{H.spectral_bounds().lo - 1e-3, 0.0};
    const auto pairs = eigs_in_window(H, window, static_cast<int>(H.size()));
    Slot& slot = slots[static_cast<std::size_t>(r)];
    for (const auto& p : pairs) {
      slot.infimum = std::min(slot.infimum, p.value);
      if (p.value < lambda0 - 1e-8) ++slot.below;
      if (p.value >= lambda0) {
        slot.values.push_back(p.value);
        slot.participation.push_back(participation_ratio(p.vector));
      }
    }
  });

  std::vector<std::pair<double, double>> pooled;
  for (const auto& slot : slots) {
    report.per_realization.push_back(slot.values.size());
    report.infimum = std::min(report.infimum, slot.infimum);
    report.below_lambda0 += slot.below;
    for (std::size_t i = 0; i < slot.values.size(); ++i) pooled.emplace_back(slot.values[i], slot.participation[i]);
  }
  std::sort(pooled.begin(), pooled.end());
  for (const auto& [v, pr] : pooled) {
    report.eigenvalues.push_back(v);
    report.participation.push_back(pr);
  }
  double last = lambda0;
  report.largest_gap = 0.0;
  for (double v : report.eigenvalues) {
    report.largest_gap = std::max(report.largest_gap, v - last);
    last = v;
  }
  report.largest_gap = std::max(report.largest_gap, 0.0 - last);
  if (!report.participation.empty()) {
    std::vector<double> pr = report.participation;
    const auto mid = pr.size() / 2;
    std::nth_element(pr.begin(), pr.begin() + static_cast<std::ptrdiff_t>(mid), pr.end());
    double med = pr[mid];
    if (pr.size() % 2 == 0) {
      med = 0.5 * (med + *std::max_element(pr.begin(), pr.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    report.median_participation = med;
  }
  return report;
}

}  // namespace sparselab
