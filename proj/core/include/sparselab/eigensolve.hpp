#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sparselab/box_operator.hpp"

namespace sparselab {

enum class EigenMethod {
  automatic,     ///< tridiagonal for d = 1 Dirichlet, dense up to dense_limit, else shift-invert
  dense,         ///< full diagonalization; the oracle for everything else
  tridiagonal,   ///< LAPACK MRRR on the d = 1 Dirichlet chain, index range from Sturm counts
  shift_invert,  ///< Lanczos on (H - sigma)^{-1} with sigma at the window center
};

struct EigenOptions {
  EigenMethod method = EigenMethod::automatic;
  double residual_tol = 1e-8;
  Eigen::Index dense_limit = 2500;
  std::uint64_t seed = 0x5EEDULL;
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  ///< unit norm
  double residual = 0.0;   ///< |H v - value v|
};

/// Eigenpairs with window.lo <= value < window.hi, ascending. When the window
/// holds more than k_max eigenvalues the k_max closest to the window center are
/// kept. Degenerate eigenvalues come back as some orthonormal basis.
std::vector<EigenPair> eigs_in_window(const BoxOperator& H, Interval window, int k_max, EigenOptions options = {});

/// Number of eigenvalues strictly below x, from the inertia of H - x.
Eigen::Index count_below(const BoxOperator& H, double x);

}  // namespace sparselab
