#pragma once

#include <complex>

#include <Eigen/Dense>

#include "sparselab/box_operator.hpp"

namespace sparselab {

struct StieltjesOptions {
  double tolerance = 1e-10;
  /// Real z is moved to z + i * real_axis_offset before solving.
  double real_axis_offset = 1e-8;
  int max_iterations = 0;  ///< 0 picks 4 * size
};

/// Solves (H - z) u = rhs. Iterative first, sparse LU if that stalls.
Eigen::VectorXcd solve_shifted(const BoxOperator& H, const Eigen::VectorXcd& rhs, std::complex<double> z,
                               const StieltjesOptions& options = {});

/// m(z) = <(H - z)^{-1} phi, phi>, linear in the first slot.
std::complex<double> stieltjes(const BoxOperator& H, const LatticeField& phi, std::complex<double> z,
                               const StieltjesOptions& options = {});

/// (sum |v|^2)^2 / sum |v|^4; between 1 and the vector length.
double participation_ratio(const Eigen::VectorXcd& v);
double participation_ratio(const Eigen::VectorXd& v);

}  // namespace sparselab
