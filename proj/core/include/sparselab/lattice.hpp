#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sparselab {

using Coord = std::int64_t;

/// A point of Z^d. Ordering is lexicographic on the coordinates, which fixes
/// every enumeration order in the library.
class Site {
 public:
  Site() = default;
  explicit Site(std::vector<Coord> coords) : coords_(std::move(coords)) {}
  Site(std::initializer_list<Coord> coords) : coords_(coords) {}

  static Site origin(int dim) { return Site(std::vector<Coord>(static_cast<std::size_t>(dim), 0)); }
  /// k * e_axis in dimension dim.
  static Site on_axis(int dim, int axis, Coord k);

  int dim() const { return static_cast<int>(coords_.size()); }
  Coord operator[](int axis) const { return coords_[static_cast<std::size_t>(axis)]; }
  Coord& operator[](int axis) { return coords_[static_cast<std::size_t>(axis)]; }
  std::span<const Coord> coords() const { return coords_; }

  /// Euclidean norm |n|.
  double norm() const;
  Coord norm_inf() const;
  Coord norm_l1() const;

  auto operator<=>(const Site&) const = default;
  bool operator==(const Site&) const = default;

  Site& operator+=(const Site& other);
  Site& operator-=(const Site& other);
  Site operator-() const;

  std::string str() const;

 private:
  std::vector<Coord> coords_;
};

Site operator+(Site lhs, const Site& rhs);
Site operator-(Site lhs, const Site& rhs);
Site operator*(Coord k, Site site);

/// Euclidean distance between lattice points.
double distance(const Site& a, const Site& b);

enum class Boundary { periodic, dirichlet };

/// The cube {n : |n|_inf <= R} with a boundary rule for the Laplacian.
/// Sites are stored lexicographically; the first coordinate is the slowest.
class LatticeBox {
 public:
  LatticeBox(int dim, Coord radius, Boundary boundary = Boundary::periodic);

  int dim() const { return dim_; }
  Coord radius() const { return radius_; }
  Boundary boundary() const { return boundary_; }
  Coord side() const { return 2 * radius_ + 1; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  bool contains(const Site& n) const;
  /// Linear index of n; throws ConfigError when n lies outside the box.
  std::size_t index(const Site& n) const;
  Site site(std::size_t index) const;
  /// Coordinate of the given linear index along one axis.
  Coord coord(std::size_t index, int axis) const;

  bool operator==(const LatticeBox&) const = default;

 private:
  int dim_;
  Coord radius_;
  Boundary boundary_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

/// Complex function on a finite box.
class LatticeField {
 public:
  explicit LatticeField(LatticeBox box);
  LatticeField(LatticeBox box, Eigen::VectorXcd values);

  static LatticeField delta(const LatticeBox& box, const Site& n);

  const LatticeBox& box() const { return box_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }

  std::complex<double> at(const Site& n) const { return values_[static_cast<Eigen::Index>(box_.index(n))]; }
  std::complex<double>& at(const Site& n) { return values_[static_cast<Eigen::Index>(box_.index(n))]; }

  double norm() const { return values_.norm(); }
  /// <this, other> = sum this(n) * conj(other(n)).
  std::complex<double> inner(const LatticeField& other) const;

 private:
  LatticeBox box_;
  Eigen::VectorXcd values_;
};

/// Symbol of the free operator, a(xi) = sum_j (2 - 2 cos xi_j).
double symbol(std::span<const double> xi);
/// Symbol with a dimension check against an expected d.
double symbol(std::span<const double> xi, int dim);

/// out += H0 in on the box, with the box's boundary rule. Dirichlet truncation
/// treats sites outside the box as zero, so the diagonal stays 2d.
template <class InVec, class OutVec>
void add_free_hamiltonian(const LatticeBox& box, const InVec& in, OutVec& out) {
  const Coord side = box.side();
  const auto n = static_cast<Eigen::Index>(box.size());
  const double diag = 2.0 * box.dim();
  for (Eigen::Index i = 0; i < n; ++i) out[i] += diag * in[i];
  if (side == 1) {
    if (box.boundary() == Boundary::periodic) {
      for (Eigen::Index i = 0; i < n; ++i) out[i] -= diag * in[i];
    }
    return;
  }
  for (int axis = 0; axis < box.dim(); ++axis) {
    const auto s = static_cast<Eigen::Index>(box.stride(axis));
    const Eigen::Index wrap = s * (side - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Coord c = (i / s) % side;
      if (c + 1 < side) {
        out[i] -= in[i + s];
      } else if (box.boundary() == Boundary::periodic) {
        out[i] -= in[i - wrap];
      }
      if (c > 0) {
        out[i] -= in[i - s];
      } else if (box.boundary() == Boundary::periodic) {
        out[i] -= in[i + wrap];
      }
    }
  }
}

class Potential;

LatticeField apply_h0(const LatticeField& u);
LatticeField apply_h(const LatticeField& u, const Potential& V);

/// Sparse real potential on Z^d with cached separations
/// d(n) = dist(n, supp V \ {n}) for every support site.
class Potential {
 public:
  explicit Potential(int dim);
  /// Zero values are dropped; non-finite values raise ConfigError.
  Potential(int dim, std::map<Site, double> entries);

  int dim() const { return dim_; }
  double operator()(const Site& n) const;
  const std::map<Site, double>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  /// Support in lexicographic order.
  std::vector<Site> support() const;
  double sup_norm() const;
  double min_value() const;
  double max_value() const;

  /// d(n) for a support site (infinity for a single-site support). For sites
  /// off the support this is the distance to the support.
  double separation(const Site& n) const;
  const std::map<Site, double>& separations() const { return separation_; }

  Potential restricted(const LatticeBox& box) const;
  /// W(x) = V(x + shift), so the site `shift` of V moves to the origin.
  Potential translated(const Site& shift) const;

 private:
  void compute_separations();

  int dim_;
  std::map<Site, double> entries_;
  std::map<Site, double> separation_;
};

/// Constant amplitude on every site of a support set.
Potential constant_potential(int dim, std::span<const Site> support, double value);

enum class SparseFamily {
  power_axis,    ///< ceil(k^p) e_axis, optionally mirrored to -ceil(k^p) e_axis
  power_shells,  ///< ceil(k^p) (+-e_i) for every axis i
  explicit_sites,
};

struct SparseRule {
  SparseFamily family = SparseFamily::power_axis;
  int dim = 1;
  double exponent = 2.0;
  Coord k_min = 1;
  bool mirrored = false;
  int axis = 0;
  std::vector<Site> sites;  ///< explicit_sites only
};

/// ceil(k^p), exact for integral p. The k-th shell radius of the power rules.
Coord power_rule_radius(Coord k, double p);

/// Generated support with separations aligned to `sites`.
struct SparseSupport {
  std::vector<Site> sites;
  std::vector<double> separation;
};

/// Sites of the rule with |n|_inf <= R in lexicographic order, with d(n)
/// computed within the generated set.
SparseSupport sparse_support(const SparseRule& rule, Coord radius);

/// min over generated sites with |n| >= R/4 of d(n)/|n|^delta. Growth of this
/// quantity with R is the finite-box face of the sparseness condition.
double tail_sparseness_ratio(const SparseSupport& support, double delta, Coord radius);

/// Independent uniform amplitudes on [-a, 0]. The value at a site depends only
/// on (seed, site), so supports that share sites share amplitudes.
Potential sample_potential(int dim, std::span<const Site> support, double a, std::uint64_t seed);

/// Partial sums of |V(n)| / |n|^{(d-1)/2} over 0 < |n| <= R for each R.
std::vector<double> weighted_partial_sums(const Potential& V, std::span<const double> radii);

}  // namespace sparselab
