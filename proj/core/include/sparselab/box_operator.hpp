#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sparselab/lattice.hpp"

namespace sparselab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
};

/// H = H0 + V on a finite box. Potential sites outside the box are dropped.
/// Real symmetric; the spectrum lies in [min(0, min V), 4d + max(0, max V)].
class BoxOperator {
 public:
  BoxOperator(LatticeBox box, const Potential& V);

  const LatticeBox& box() const { return box_; }
  const Potential& potential() const { return potential_; }
  /// On-site potential in the box's site order.
  const Eigen::VectorXd& onsite() const { return onsite_; }
  Eigen::Index size() const { return onsite_.size(); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  LatticeField apply(const LatticeField& u) const;

  Eigen::SparseMatrix<double> sparse() const;
  Eigen::MatrixXd dense() const;

  /// Interval enclosing the spectrum.
  Interval spectral_bounds() const;

 private:
  LatticeBox box_;
  Potential potential_;
  Eigen::VectorXd onsite_;
};

}  // namespace sparselab
