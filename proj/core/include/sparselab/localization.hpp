#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sparselab/box_operator.hpp"
#include "sparselab/green.hpp"
#include "sparselab/lattice.hpp"

namespace sparselab {

/// supp(V) intersected with a box, in lexicographic order.
class SupportIndex {
 public:
  explicit SupportIndex(const Potential& V);
  SupportIndex(const Potential& V, const LatticeBox& box);

  std::size_t size() const { return sites_.size(); }
  const std::vector<Site>& sites() const { return sites_; }
  const Site& site(std::size_t i) const { return sites_[i]; }
  std::optional<std::size_t> find(const Site& n) const;

 private:
  std::vector<Site> sites_;
  std::map<Site, std::size_t> lookup_;
};

struct LocalizationOptions {
  double eps = 0.1;                    ///< lambda must avoid [-eps, 4d + eps]
  double resonance_threshold = 1e-12;  ///< smallest admissible |1 + G(lambda;0) V(n)|
  double near_eigen_threshold = 1e-6;  ///< sigma_min below this flags an eigenvalue
  double summable_threshold = 1e-3;    ///< relative change of |psi| between radii
};

/// alpha(n) = 1 / (1 + G(lambda; 0) V(n)). Throws ResonanceError when the
/// denominator is below options.resonance_threshold.
double alpha_coeff(const GreenKernel& green, double lambda, const Site& n, const Potential& V,
                   const LocalizationOptions& options = {});

/// T(n, l) = alpha(n) G(lambda; n - l) V(l) for l != n over a support index.
struct TKernel {
  double lambda = 0.0;
  Eigen::MatrixXd matrix;
  Eigen::VectorXd alpha;
  Eigen::VectorXd values;  ///< V on the support
};

TKernel build_T(const GreenKernel& green, double lambda, const Potential& V, const SupportIndex& support,
                const LocalizationOptions& options = {});

/// sqrt(max row sum * max column sum) of |T|; an upper bound on |T|_2.
double schur_bound_direct(const Eigen::MatrixXd& T);

/// Schur bound with |G(lambda; n - l)| replaced by the envelope C e^{-gamma |n - l|}.
double schur_bound_exponential(const TKernel& T, const SupportIndex& support, const DecayEnvelope& envelope);

/// M = I + G_S V_S with the diagonal kept. M = diag(alpha)^{-1} (I + T) when
/// every alpha is finite, and it stays meaningful at a single-site resonance.
Eigen::MatrixXd birman_schwinger(const GreenKernel& green, double lambda, const Potential& V,
                                 const SupportIndex& support);

double smallest_singular_value(const Eigen::MatrixXd& M);

/// psi = (H - lambda)^{-1} chi_j for V restricted to the support, on the
/// support sites, from M psi_S = G(lambda; . - j).
Eigen::VectorXd resolve_on_support(const GreenKernel& green, double lambda, const Site& j, const Potential& V,
                                   const SupportIndex& support);

enum class SimonWolffVerdict { summable, near_eigenvalue, inconclusive };
std::string to_string(SimonWolffVerdict v);

struct SimonWolffStep {
  Coord radius = 0;
  std::size_t support_size = 0;
  double psi_norm = 0.0;        ///< |psi| over the Dirichlet box of this radius
  double tail_norm = 0.0;       ///< |psi| over support sites outside the previous radius
  double sigma_min = 0.0;       ///< smallest singular value of I + G_S V_S
  double sigma_min_t = 0.0;     ///< smallest singular value of I + T (NaN at a resonance)
  double relative_change = 0.0; ///< | |psi_R| - |psi_prev| | / |psi_R|, NaN at the first radius
  SimonWolffVerdict verdict = SimonWolffVerdict::inconclusive;
};

struct SimonWolffReport {
  double lambda = 0.0;
  std::vector<SimonWolffStep> steps;
  SimonWolffVerdict verdict = SimonWolffVerdict::inconclusive;  ///< verdict of the last radius
};

SimonWolffReport simon_wolff_resolve(const GreenKernel& green, double lambda, const Site& j, const Potential& V,
                                     const std::vector<Coord>& radii, const LocalizationOptions& options = {});

/// Values of lambda in [lo, hi] where sigma_min(I + G_S V_S) has a local
/// minimum below the threshold. The grid locates minima, golden section
/// refines them.
struct EigenCandidate {
  double lambda = 0.0;
  double sigma_min = 0.0;
};
std::vector<EigenCandidate> eigenvalue_candidates(const GreenKernel& green, const Potential& V,
                                                  const SupportIndex& support, Interval window, int grid_points,
                                                  const LocalizationOptions& options = {});

/// Measure of {lambda : |1 + G(lambda;0) V(n)| < |n|^{-d-eps}} estimated on a
/// uniform grid, against the bound eps^{-1} |V|_inf^2 |n|^{-d-eps}.
struct OnePlusGvEntry {
  Site site;
  double value = 0.0;       ///< V(n)
  double threshold = 0.0;   ///< |n|^{-d-eps}
  double measure = 0.0;
  double bound = 0.0;
  std::size_t hits = 0;
  bool resolution_warning = false;  ///< grid spacing exceeds the threshold
};
struct OnePlusGvReport {
  double spacing = 0.0;
  std::vector<OnePlusGvEntry> entries;
};
OnePlusGvReport one_plus_gv_scan(const GreenKernel& green, const Potential& V, double eps,
                                 const std::vector<double>& lambda_grid, const std::vector<Site>& sites);

struct ImpurityOptions {
  double residual_tol = 1e-10;
  double green_tolerance = 1e-13;  ///< quadrature tolerance of green_onsite in d = 3
  int max_iterations = 200;
};
struct ImpurityLevel {
  double lambda = 0.0;
  double residual = 0.0;  ///< 1 + beta G(lambda; 0)
  int iterations = 0;
};
/// Root of 1 + beta G(lambda; 0) on (-|beta| - 4d, 0). Throws NoBoundStateError
/// when no sign change can be resolved below zero.
ImpurityLevel impurity_level(int dim, double beta, ImpurityOptions options = {});

struct BumpMeasureRow {
  Site site;
  double amplitude = 0.0;
  double sup_difference = 0.0;  ///< sup over z of |m_j(z) - m_beta(z)|
  double conjugate_defect = 0.0;  ///< sup over z of |m_j(conj z) - conj m_j(z)|
  std::vector<std::complex<double>> m;
};
struct BumpMeasureReport {
  Coord local_radius = 0;
  std::vector<std::complex<double>> reference;  ///< m_beta(z) on the matched box
  std::vector<BumpMeasureRow> rows;
  bool strictly_decreasing = false;
};
/// Stieltjes transforms at chi_{n_j} on Dirichlet boxes of radius local_radius
/// centered at each far site, compared with -Laplacian + beta P_0 on the same
/// box. Throws GeometryError when a local box leaves the global box.
BumpMeasureReport bump_measure_compare(const Potential& V, const std::vector<Site>& far_sites, double beta,
                                       const std::vector<std::complex<double>>& z_list, Coord local_radius,
                                       Coord global_radius);

struct SpectrumFillReport {
  double lambda0 = 0.0;
  double a = 0.0;
  Coord radius = 0;
  int realizations = 0;
  std::vector<double> eigenvalues;       ///< pooled, sorted, inside [lambda0, 0)
  std::vector<double> participation;     ///< aligned with eigenvalues
  std::vector<std::size_t> per_realization;
  double largest_gap = 0.0;   ///< over the pooled eigenvalues with the endpoints lambda0 and 0 included
  double median_participation = 0.0;
  double infimum = 0.0;       ///< smallest eigenvalue seen, any window
  std::size_t below_lambda0 = 0;
};
/// Realization r uses amplitudes from derive_seed(seed, r); work is spread over
/// `threads` workers with results independent of the thread count. Amplitudes
/// are uniform on [-a, 0] with a = `amplitude`, or the coupling bound at
/// lambda0 when `amplitude` is not positive.
SpectrumFillReport spectrum_fill_scan(double lambda0, const SparseRule& rule, Coord radius, int realizations,
                                      std::uint64_t seed, int threads = 1, double amplitude = 0.0);

/// Coupling bound for the spectrum-fill model, reusing a kernel of dimension d.
double spectrum_fill_amplitude(int dim, double lambda0);

}  // namespace sparselab
