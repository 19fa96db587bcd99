#include "sparselab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sparselab/errors.hpp"
#include "sparselab/random.hpp"

namespace sparselab {

// --- Site -------------------------------------------------------------------

Site Site::on_axis(int dim, int axis, Coord k) {
  Site s = origin(dim);
  s[axis] = k;
  return s;
}

double Site::norm() const {
  double sum = 0.0;
  for (auto c : coords_) sum += static_cast<double>(c) * static_cast<double>(c);
  return std::sqrt(sum);
}

Coord Site::norm_inf() const {
  Coord m = 0;
  for (auto c : coords_) m = std::max(m, c < 0 ? -c : c);
  return m;
}

Coord Site::norm_l1() const {
  Coord m = 0;
  for (auto c : coords_) m += c < 0 ? -c : c;
  return m;
}

Site& Site::operator+=(const Site& other) {
  if (other.dim() != dim()) throw ConfigError("site dimension mismatch");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += other.coords_[i];
  return *this;
}

Site& Site::operator-=(const Site& other) {
  if (other.dim() != dim()) throw ConfigError("site dimension mismatch");
  for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= other.coords_[i];
  return *this;
}

Site Site::operator-() const {
  Site s = *this;
  for (auto& c : s.coords_) c = -c;
  return s;
}

std::string Site::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) os << ',';
    os << coords_[i];
  }
  os << ')';
  return os.str();
}

Site operator+(Site lhs, const Site& rhs) { return lhs += rhs; }
Site operator-(Site lhs, const Site& rhs) { return lhs -= rhs; }
Site operator*(Coord k, Site site) {
  for (int i = 0; i < site.dim(); ++i) site[i] *= k;
  return site;
}

double distance(const Site& a, const Site& b) { return (a - b).norm(); }

// --- LatticeBox -------------------------------------------------------------

LatticeBox::LatticeBox(int dim, Coord radius, Boundary boundary)
    : dim_(dim), radius_(radius), boundary_(boundary), size_(1) {
  if (dim < 1) throw ConfigError("lattice dimension must be >= 1");
  if (radius < 0) throw ConfigError("box radius must be nonnegative");
  strides_.assign(static_cast<std::size_t>(dim), 1);
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  for (int axis = dim - 1; axis >= 0; --axis) {
    strides_[static_cast<std::size_t>(axis)] = size_;
    size_ *= side;
  }
}

bool LatticeBox::contains(const Site& n) const {
  return n.dim() == dim_ && n.norm_inf() <= radius_;
}

std::size_t LatticeBox::index(const Site& n) const {
  if (!contains(n)) throw ConfigError("site " + n.str() + " lies outside the box");
  std::size_t idx = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    idx += static_cast<std::size_t>(n[axis] + radius_) * strides_[static_cast<std::size_t>(axis)];
  }
  return idx;
}

Coord LatticeBox::coord(std::size_t index, int axis) const {
  const auto s = strides_[static_cast<std::size_t>(axis)];
  return static_cast<Coord>((index / s) % static_cast<std::size_t>(side())) - radius_;
}

Site LatticeBox::site(std::size_t index) const {
  std::vector<Coord> c(static_cast<std::size_t>(dim_));
  for (int axis = 0; axis < dim_; ++axis) c[static_cast<std::size_t>(axis)] = coord(index, axis);
  return Site(std::move(c));
}

// --- LatticeField -----------------------------------------------------------

LatticeField::LatticeField(LatticeBox box)
    : box_(std::move(box)), values_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(box_.size()))) {}

LatticeField::LatticeField(LatticeBox box, Eigen::VectorXcd values)
    : box_(std::move(box)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != box_.size()) {
    throw ConfigError("field length does not match the box site count");
  }
}

LatticeField LatticeField::delta(const LatticeBox& box, const Site& n) {
  LatticeField f(box);
  f.at(n) = 1.0;
  return f;
}

std::complex<double> LatticeField::inner(const LatticeField& other) const {
  if (!(other.box_ == box_)) throw ConfigError("fields live on different boxes");
  // Eigen's dot conjugates its first argument.
  return other.values_.dot(values_);
}

// --- symbol and free operator -----------------------------------------------

double symbol(std::span<const double> xi) {
  double a = 0.0;
  for (double x : xi) a += 2.0 - 2.0 * std::cos(x);
  return a;
}

double symbol(std::span<const double> xi, int dim) {
  if (static_cast<int>(xi.size()) != dim) {
    throw ConfigError("symbol: expected " + std::to_string(dim) + " frequencies, got " +
                      std::to_string(xi.size()));
  }
  return symbol(xi);
}

LatticeField apply_h0(const LatticeField& u) {
  LatticeField out(u.box());
  add_free_hamiltonian(u.box(), u.values(), out.values());
  return out;
}

LatticeField apply_h(const LatticeField& u, const Potential& V) {
  if (V.dim() != u.box().dim()) throw ConfigError("potential and field dimensions differ");
  LatticeField out = apply_h0(u);
  for (const auto& [n, v] : V.entries()) {
    if (u.box().contains(n)) out.at(n) += v * u.at(n);
  }
  return out;
}

// --- Potential --------------------------------------------------------------

Potential::Potential(int dim) : dim_(dim) {
  if (dim < 1) throw ConfigError("potential dimension must be >= 1");
}

Potential::Potential(int dim, std::map<Site, double> entries) : Potential(dim) {
  for (auto& [n, v] : entries) {
    if (n.dim() != dim) throw ConfigError("potential site " + n.str() + " has wrong dimension");
    if (!std::isfinite(v)) throw ConfigError("potential value at " + n.str() + " is not finite");
    if (v != 0.0) entries_.emplace(n, v);
  }
  compute_separations();
}

double Potential::operator()(const Site& n) const {
  auto it = entries_.find(n);
  return it == entries_.end() ? 0.0 : it->second;
}

std::vector<Site> Potential::support() const {
  std::vector<Site> out;
  out.reserve(entries_.size());
  for (const auto& [n, v] : entries_) out.push_back(n);
  return out;
}

double Potential::sup_norm() const {
  double m = 0.0;
  for (const auto& [n, v] : entries_) m = std::max(m, std::abs(v));
  return m;
}

double Potential::min_value() const {
  double m = 0.0;
  for (const auto& [n, v] : entries_) m = std::min(m, v);
  return m;
}

double Potential::max_value() const {
  double m = 0.0;
  for (const auto& [n, v] : entries_) m = std::max(m, v);
  return m;
}

namespace {

// Nearest-other-point distances by a sweep along the first coordinate: points
// are sorted, and the scan in each direction stops once the first-coordinate
// gap alone exceeds the best distance found.
std::vector<double> nearest_other(const std::vector<Site>& sorted) {
  const std::size_t n = sorted.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = static_cast<double>(sorted[j][0] - sorted[i][0]);
      if (gap >= best[i]) break;
      best[i] = std::min(best[i], distance(sorted[i], sorted[j]));
    }
    for (std::size_t j = i; j-- > 0;) {
      const double gap = static_cast<double>(sorted[i][0] - sorted[j][0]);
      if (gap >= best[i]) break;
      best[i] = std::min(best[i], distance(sorted[i], sorted[j]));
    }
  }
  return best;
}

}  // namespace

void Potential::compute_separations() {
  const auto sites = support();
  const auto d = nearest_other(sites);
  separation_.clear();
  for (std::size_t i = 0; i < sites.size(); ++i) separation_.emplace(sites[i], d[i]);
}

double Potential::separation(const Site& n) const {
  if (auto it = separation_.find(n); it != separation_.end()) return it->second;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [m, v] : entries_) best = std::min(best, distance(n, m));
  return best;
}

Potential Potential::restricted(const LatticeBox& box) const {
  std::map<Site, double> kept;
  for (const auto& [n, v] : entries_) {
    if (box.contains(n)) kept.emplace(n, v);
  }
  return Potential(dim_, std::move(kept));
}

Potential Potential::translated(const Site& shift) const {
  std::map<Site, double> moved;
  for (const auto& [n, v] : entries_) moved.emplace(n - shift, v);
  return Potential(dim_, std::move(moved));
}

Potential constant_potential(int dim, std::span<const Site> support, double value) {
  std::map<Site, double> entries;
  for (const auto& n : support) entries.emplace(n, value);
  return Potential(dim, std::move(entries));
}

// --- sparse supports --------------------------------------------------------

Coord power_rule_radius(Coord k, double p) {
  const double rounded = std::round(p);
  if (std::abs(p - rounded) < 1e-12 && rounded >= 0) {
    Coord r = 1;
    for (int i = 0; i < static_cast<int>(rounded); ++i) r *= k;
    return r;
  }
  return static_cast<Coord>(std::ceil(std::pow(static_cast<double>(k), p) - 1e-9));
}

SparseSupport sparse_support(const SparseRule& rule, Coord radius) {
  if (rule.dim < 1) throw ConfigError("sparse rule: dimension must be >= 1");
  if (radius < 0) throw ConfigError("sparse rule: radius must be nonnegative");
  std::vector<Site> sites;

  if (rule.family == SparseFamily::explicit_sites) {
    for (const auto& n : rule.sites) {
      if (n.dim() != rule.dim) throw ConfigError("sparse rule: site " + n.str() + " has wrong dimension");
      if (n.norm_inf() <= radius) sites.push_back(n);
    }
  } else {
    if (!(rule.exponent > 1.0)) {
      throw ConfigError("sparse rule: exponent must exceed 1 for a sparse support");
    }
    if (rule.k_min < 0) throw ConfigError("sparse rule: k_min must be nonnegative");
    if (rule.family == SparseFamily::power_axis && (rule.axis < 0 || rule.axis >= rule.dim)) {
      throw ConfigError("sparse rule: axis out of range");
    }
    for (Coord k = rule.k_min;; ++k) {
      const Coord r = power_rule_radius(k, rule.exponent);
      if (r > radius) break;
      if (rule.family == SparseFamily::power_axis) {
        sites.push_back(Site::on_axis(rule.dim, rule.axis, r));
        if (rule.mirrored) sites.push_back(Site::on_axis(rule.dim, rule.axis, -r));
      } else {
        for (int axis = 0; axis < rule.dim; ++axis) {
          sites.push_back(Site::on_axis(rule.dim, axis, r));
          sites.push_back(Site::on_axis(rule.dim, axis, -r));
        }
      }
    }
  }

  std::sort(sites.begin(), sites.end());
  if (std::adjacent_find(sites.begin(), sites.end()) != sites.end()) {
    throw ConfigError("sparse rule: generated sites collide");
  }
  SparseSupport out;
  out.separation = nearest_other(sites);
  out.sites = std::move(sites);
  return out;
}

double tail_sparseness_ratio(const SparseSupport& support, double delta, Coord radius) {
  double best = std::numeric_limits<double>::infinity();
  const double cut = static_cast<double>(radius) / 4.0;
  for (std::size_t i = 0; i < support.sites.size(); ++i) {
    const double r = support.sites[i].norm();
    if (r < cut || r == 0.0) continue;
    best = std::min(best, support.separation[i] / std::pow(r, delta));
  }
  return best;
}

Potential sample_potential(int dim, std::span<const Site> support, double a, std::uint64_t seed) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("sample_potential: amplitude bound a must be > 0");
  std::map<Site, double> entries;
  for (const auto& n : support) {
    if (n.dim() != dim) throw ConfigError("sample_potential: site " + n.str() + " has wrong dimension");
    entries.emplace(n, -a * unit_interval(hash_coords(seed, n.coords())));
  }
  return Potential(dim, std::move(entries));
}

std::vector<double> weighted_partial_sums(const Potential& V, std::span<const double> radii) {
  const double exponent = 0.5 * (V.dim() - 1);
  std::vector<std::pair<double, double>> terms;
  terms.reserve(V.size());
  for (const auto& [n, v] : V.entries()) {
    const double r = n.norm();
    if (r == 0.0) continue;
    terms.emplace_back(r, std::abs(v) / std::pow(r, exponent));
  }
  std::sort(terms.begin(), terms.end());
  std::vector<double> out;
  out.reserve(radii.size());
  for (double R : radii) {
    double sum = 0.0;
    for (const auto& [r, w] : terms) {
      if (r > R) break;
      sum += w;
    }
    out.push_back(sum);
  }
  return out;
}

}  // namespace sparselab
