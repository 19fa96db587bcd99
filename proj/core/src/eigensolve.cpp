#include "sparselab/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <lapacke.h>

#include "sparselab/errors.hpp"

namespace sparselab {

namespace {

// Inertia of the dense matrix H - x from the Bunch-Kaufman factorization.
// A 2x2 pivot block contributes one negative eigenvalue when its determinant
// is negative, otherwise its trace decides.
Eigen::Index bunch_kaufman_count(const BoxOperator& H, double x) {
  Eigen::MatrixXd A = H.dense();
  A.diagonal().array() -= x;
  const auto n = static_cast<lapack_int>(A.rows());
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, A.data(), n, ipiv.data());
  if (info < 0) throw SolverError("count_below: LAPACK dsytrf failed with info " + std::to_string(info));
  Eigen::Index count = 0;
  for (lapack_int k = 0; k < n; ++k) {
    if (ipiv[static_cast<std::size_t>(k)] > 0) {
      if (A(k, k) < 0.0) ++count;
    } else {
      const double a = A(k, k), b = A(k + 1, k), c = A(k + 1, k + 1);
      const double det = a * c - b * b;
      if (det < 0.0) count += 1;
      else if (a + c < 0.0) count += 2;
      ++k;
    }
  }
  return count;
}

bool is_chain(const BoxOperator& H) {
  return H.box().dim() == 1 && H.box().boundary() == Boundary::dirichlet;
}

// Sturm count for the symmetric tridiagonal chain: negative pivots of T - x.
Eigen::Index sturm_count(const Eigen::VectorXd& diag, double x) {
  Eigen::Index count = 0;
  double q = 1.0;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    q = diag[i] - x - (i > 0 ? 1.0 / q : 0.0);  // off-diagonal entries are -1
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

void keep_nearest(std::vector<EigenPair>& pairs, Interval window, int k_max) {
  if (static_cast<int>(pairs.size()) > k_max) {
    const double c = window.center();
    std::sort(pairs.begin(), pairs.end(),
              [c](const EigenPair& a, const EigenPair& b) { return std::abs(a.value - c) < std::abs(b.value - c); });
    pairs.resize(static_cast<std::size_t>(k_max));
  }
  std::sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
}

void check_residuals(const BoxOperator& H, std::vector<EigenPair>& pairs, double tol) {
  for (auto& p : pairs) {
    p.residual = (H.apply(p.vector) - p.value * p.vector).norm();
    if (!(p.residual <= tol)) {
      throw SolverError("eigs_in_window: residual " + std::to_string(p.residual) + " at eigenvalue " +
                        std::to_string(p.value) + " exceeds " + std::to_string(tol));
    }
  }
}

std::vector<EigenPair> dense_window(const BoxOperator& H, Interval window) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H.dense());
  if (solver.info() != Eigen::Success) throw SolverError("eigs_in_window: dense diagonalization failed");
  std::vector<EigenPair> out;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lam = solver.eigenvalues()[i];
    if (lam >= window.lo && lam < window.hi) out.push_back({lam, solver.eigenvectors().col(i), 0.0});
  }
  return out;
}

std::vector<EigenPair> chain_window(const BoxOperator& H, Interval window, int k_max) {
  const Eigen::VectorXd diag = H.onsite().array() + 2.0;
  const Eigen::Index n = diag.size();
  const Eigen::Index below_lo = sturm_count(diag, window.lo);
  const Eigen::Index below_hi = sturm_count(diag, window.hi);
  if (below_hi <= below_lo) return {};
  Eigen::Index il = below_lo + 1;
  Eigen::Index iu = below_hi;
  if (iu - il + 1 > k_max) {
    // The k_max values nearest the center are among the k_max on either side
    // of it; keep_nearest trims the rest.
    const Eigen::Index mid = sturm_count(diag, window.center());
    il = std::max(il, mid - k_max + 1);
    iu = std::min(iu, mid + k_max);
  }
  Eigen::VectorXd d = diag;
  Eigen::VectorXd e = Eigen::VectorXd::Constant(std::max<Eigen::Index>(n - 1, 1), -1.0);
  const auto m_expected = iu - il + 1;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, m_expected);
  std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * m_expected));
  lapack_int m = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', static_cast<lapack_int>(n), d.data(), e.data(),
                                         0.0, 0.0, static_cast<lapack_int>(il), static_cast<lapack_int>(iu), 0.0, &m,
                                         w.data(), z.data(), static_cast<lapack_int>(n), isuppz.data());
  if (info != 0) throw SolverError("eigs_in_window: LAPACK dstevr failed with info " + std::to_string(info));
  std::vector<EigenPair> out;
  for (lapack_int i = 0; i < m; ++i) {
    if (w[i] >= window.lo && w[i] < window.hi) out.push_back({w[i], z.col(i).normalized(), 0.0});
  }
  return out;
}

// Lanczos with full reorthogonalization on (H - sigma)^{-1}, deflating pairs
// already accepted so repeated runs recover degenerate eigenvalues.
std::vector<EigenPair> shift_invert_window(const BoxOperator& H, Interval window, int k_max,
                                           const EigenOptions& options) {
  const Eigen::Index n = H.size();
  const Eigen::Index target_total = count_below(H, window.hi) - count_below(H, window.lo);
  if (target_total <= 0) return {};
  const Eigen::Index target = std::min<Eigen::Index>(target_total, k_max);

  // Offset the shift off the center so it is unlikely to hit an eigenvalue.
  const double sigma = window.center() + 1.234567e-7 * std::max(1.0, window.width());
  Eigen::SparseMatrix<double> K = H.sparse();
  for (Eigen::Index i = 0; i < n; ++i) K.coeffRef(i, i) -= sigma;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success) throw SolverError("eigs_in_window: factorization of H - sigma failed");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  std::vector<EigenPair> found;
  Eigen::MatrixXd deflate(n, 0);

  auto orthogonalize = [&](Eigen::VectorXd& v, const Eigen::MatrixXd& Q, Eigen::Index cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (deflate.cols() > 0) v -= deflate * (deflate.transpose() * v);
      if (cols > 0) v -= Q.leftCols(cols) * (Q.leftCols(cols).transpose() * v);
    }
  };

  Eigen::Index m = std::min<Eigen::Index>(n - deflate.cols(), std::max<Eigen::Index>(2 * target + 20, 40));
  double best_missing_residual = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 64 && static_cast<Eigen::Index>(found.size()) < target; ++attempt) {
    const Eigen::Index room = n - deflate.cols();
    if (room <= 0) break;
    m = std::min(m, room);
    Eigen::MatrixXd Q(n, m);
    Eigen::VectorXd alpha(m), beta(m);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    orthogonalize(v, Q, 0);
    v.normalize();
    Eigen::Index steps = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      Q.col(j) = v;
      Eigen::VectorXd w = lu.solve(v);
      alpha[j] = v.dot(w);
      w -= alpha[j] * v;
      if (j > 0) w -= beta[j - 1] * Q.col(j - 1);
      orthogonalize(w, Q, j + 1);
      beta[j] = w.norm();
      steps = j + 1;
      if (beta[j] < 1e-12 * std::abs(alpha[j]) + 1e-300) break;
      v = w / beta[j];
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index j = 0; j < steps; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(T);
    bool progress = false;
    for (Eigen::Index i = 0; i < steps; ++i) {
      const double theta = ritz.eigenvalues()[i];
      if (theta == 0.0) continue;
      const double lam = sigma + 1.0 / theta;
      if (!(lam >= window.lo && lam < window.hi)) continue;
      Eigen::VectorXd y = Q.leftCols(steps) * ritz.eigenvectors().col(i);
      y.normalize();
      const double res = (H.apply(y) - lam * y).norm();
      if (res <= options.residual_tol) {
        found.push_back({lam, y, res});
        deflate.conservativeResize(Eigen::NoChange, deflate.cols() + 1);
        deflate.col(deflate.cols() - 1) = y;
        progress = true;
      } else {
        best_missing_residual = std::min(best_missing_residual, res);
      }
    }
    if (!progress) {
      if (m >= room) break;
      m = std::min<Eigen::Index>(room, 2 * m);
    }
  }
  if (static_cast<Eigen::Index>(found.size()) < target) {
    throw SolverError("eigs_in_window: shift-invert Lanczos found " + std::to_string(found.size()) + " of " +
                      std::to_string(target) + " eigenpairs; best unconverged residual " +
                      std::to_string(best_missing_residual));
  }
  return found;
}

}  // namespace

Eigen::Index count_below(const BoxOperator& H, double x) {
  if (is_chain(H)) return sturm_count(H.onsite().array() + 2.0, x);
  Eigen::SparseMatrix<double> K = H.sparse();
  for (Eigen::Index i = 0; i < K.rows(); ++i) K.coeffRef(i, i) -= x;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() == Eigen::Success) return (ldlt.vectorD().array() < 0.0).count();
  // Without pivoting a leading minor of H - x can vanish even when x is not an
  // eigenvalue; symmetric lattices hit this at integer x.
  if (H.size() <= 4096) return bunch_kaufman_count(H, x);
  const double scale = std::max(1.0, std::abs(x));
  for (int attempt = 1; attempt <= 4; ++attempt) {
    Eigen::SparseMatrix<double> Ks = K;
    const double nudge = std::pow(1e3, attempt) * 1e-15 * scale;
    for (Eigen::Index i = 0; i < Ks.rows(); ++i) Ks.coeffRef(i, i) += nudge;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> retry(Ks);
    if (retry.info() == Eigen::Success) return (retry.vectorD().array() < 0.0).count();
  }
  throw SolverError("count_below: LDL^T factorization of H - x failed at x = " + std::to_string(x));
}

std::vector<EigenPair> eigs_in_window(const BoxOperator& H, Interval window, int k_max, EigenOptions options) {
  if (!(std::isfinite(window.lo) && std::isfinite(window.hi)) || !(window.lo < window.hi)) {
    throw ConfigError("eigs_in_window: window must be a finite nonempty interval");
  }
  if (k_max < 1) throw ConfigError("eigs_in_window: k_max must be >= 1");

  EigenMethod method = options.method;
  if (method == EigenMethod::automatic) {
    if (is_chain(H)) {
      method = EigenMethod::tridiagonal;
    } else if (H.size() <= options.dense_limit) {
      method = EigenMethod::dense;
    } else {
      method = EigenMethod::shift_invert;
    }
  }
  if (method == EigenMethod::tridiagonal && !is_chain(H)) {
    throw ConfigError("eigs_in_window: tridiagonal method needs a d = 1 Dirichlet box");
  }

  std::vector<EigenPair> pairs;
  switch (method) {
    case EigenMethod::dense: pairs = dense_window(H, window); break;
    case EigenMethod::tridiagonal: pairs = chain_window(H, window, k_max); break;
    case EigenMethod::shift_invert: pairs = shift_invert_window(H, window, k_max, options); break;
    case EigenMethod::automatic: break;
  }
  keep_nearest(pairs, window, k_max);
  check_residuals(H, pairs, options.residual_tol);
  return pairs;
}

}  // namespace sparselab
