#include "sparselab/box_operator.hpp"

#include <algorithm>
#include <vector>

#include "sparselab/errors.hpp"

namespace sparselab {

BoxOperator::BoxOperator(LatticeBox box, const Potential& V)
    : box_(std::move(box)), potential_(V.restricted(box_)),
      onsite_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(box_.size()))) {
  if (V.dim() != box_.dim()) throw ConfigError("BoxOperator: potential and box dimensions differ");
  for (const auto& [n, v] : potential_.entries()) onsite_[static_cast<Eigen::Index>(box_.index(n))] = v;
}

Eigen::VectorXcd BoxOperator::apply(const Eigen::VectorXcd& u) const {
  if (u.size() != size()) throw ConfigError("BoxOperator: vector length mismatch");
  Eigen::VectorXcd out = onsite_.cast<std::complex<double>>().cwiseProduct(u);
  add_free_hamiltonian(box_, u, out);
  return out;
}

Eigen::VectorXd BoxOperator::apply(const Eigen::VectorXd& u) const {
  if (u.size() != size()) throw ConfigError("BoxOperator: vector length mismatch");
  Eigen::VectorXd out = onsite_.cwiseProduct(u);
  add_free_hamiltonian(box_, u, out);
  return out;
}

LatticeField BoxOperator::apply(const LatticeField& u) const {
  if (!(u.box() == box_)) throw ConfigError("BoxOperator: field lives on a different box");
  return LatticeField(box_, apply(u.values()));
}

Eigen::SparseMatrix<double> BoxOperator::sparse() const {
  const Eigen::Index n = size();
  const Coord side = box_.side();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(2 * box_.dim() + 1));
  for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 2.0 * box_.dim() + onsite_[i]);
  if (side > 1) {
    for (int axis = 0; axis < box_.dim(); ++axis) {
      const auto s = static_cast<Eigen::Index>(box_.stride(axis));
      const Eigen::Index wrap = s * (side - 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Coord c = (i / s) % side;
        if (c + 1 < side) {
          triplets.emplace_back(i, i + s, -1.0);
        } else if (box_.boundary() == Boundary::periodic) {
          triplets.emplace_back(i, i - wrap, -1.0);
        }
        if (c > 0) {
          triplets.emplace_back(i, i - s, -1.0);
        } else if (box_.boundary() == Boundary::periodic) {
          triplets.emplace_back(i, i + wrap, -1.0);
        }
      }
    }
  } else if (box_.boundary() == Boundary::periodic) {
    triplets.emplace_back(0, 0, -2.0 * box_.dim());
  }
  Eigen::SparseMatrix<double> H(n, n);
  H.setFromTriplets(triplets.begin(), triplets.end());
  H.makeCompressed();
  return H;
}

Eigen::MatrixXd BoxOperator::dense() const { return Eigen::MatrixXd(sparse()); }

Interval BoxOperator::spectral_bounds() const {
  const double vmin = onsite_.size() ? std::min(0.0, onsite_.minCoeff()) : 0.0;
  const double vmax = onsite_.size() ? std::max(0.0, onsite_.maxCoeff()) : 0.0;
  return {vmin, 4.0 * box_.dim() + vmax};
}

}  // namespace sparselab
