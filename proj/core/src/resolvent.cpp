#include "sparselab/resolvent.hpp"

#include <cmath>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "sparselab/errors.hpp"

namespace sparselab {

namespace {

template <class Vec>
double participation(const Vec& v) {
  const double s2 = v.squaredNorm();
  if (!(s2 > 0.0)) throw ConfigError("participation_ratio: zero vector");
  const double s4 = v.cwiseAbs2().cwiseAbs2().sum();
  return s2 * s2 / s4;
}

}  // namespace

Eigen::VectorXcd solve_shifted(const BoxOperator& H, const Eigen::VectorXcd& rhs, std::complex<double> z,
                               const StieltjesOptions& options) {
  if (rhs.size() != H.size()) throw ConfigError("solve_shifted: right-hand side has the wrong length");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw SpectralParameterError("solve_shifted: z not finite");
  if (z.imag() == 0.0) z += std::complex<double>(0.0, options.real_axis_offset);

  using Sparse = Eigen::SparseMatrix<std::complex<double>>;
  Sparse A = H.sparse().cast<std::complex<double>>();
  for (Eigen::Index i = 0; i < A.rows(); ++i) A.coeffRef(i, i) -= z;

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return Eigen::VectorXcd::Zero(rhs.size());

  Eigen::BiCGSTAB<Sparse, Eigen::DiagonalPreconditioner<std::complex<double>>> iterative;
  iterative.setTolerance(options.tolerance);
  iterative.setMaxIterations(options.max_iterations > 0 ? options.max_iterations : static_cast<int>(4 * A.rows()));
  iterative.compute(A);
  Eigen::VectorXcd u = iterative.solve(rhs);
  if (iterative.info() == Eigen::Success && (A * u - rhs).norm() <= 10.0 * options.tolerance * rhs_norm) return u;

  Eigen::SparseLU<Sparse> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("solve_shifted: sparse LU factorization failed");
  u = lu.solve(rhs);
  const double rel = (A * u - rhs).norm() / rhs_norm;
  if (!(rel <= 10.0 * options.tolerance)) {
    throw SolverError("solve_shifted: relative residual " + std::to_string(rel) + " after LU fallback");
  }
  return u;
}

std::complex<double> stieltjes(const BoxOperator& H, const LatticeField& phi, std::complex<double> z,
                               const StieltjesOptions& options) {
  if (!(phi.box() == H.box())) throw ConfigError("stieltjes: test vector lives on a different box");
  const Eigen::VectorXcd u = solve_shifted(H, phi.values(), z, options);
  return phi.values().dot(u);  // sum u * conj(phi)
}

double participation_ratio(const Eigen::VectorXcd& v) { return participation(v); }
double participation_ratio(const Eigen::VectorXd& v) { return participation(v); }

}  // namespace sparselab
