#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sparselab/lattice.hpp"

// Hand-rolled generators for the property tests. Every case derives its own
// engine from a fixed seed, so failures are reproducible by case index.
namespace sparselab::testing {

inline std::mt19937_64 engine(std::uint64_t seed, int case_index) {
  return std::mt19937_64(seed * 1000003ULL + static_cast<std::uint64_t>(case_index));
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Coord integer(std::mt19937_64& g, Coord lo, Coord hi) {
  return std::uniform_int_distribution<Coord>(lo, hi)(g);
}

inline Site site(std::mt19937_64& g, int dim, Coord radius) {
  std::vector<Coord> c(static_cast<std::size_t>(dim));
  for (auto& x : c) x = integer(g, -radius, radius);
  return Site(std::move(c));
}

inline LatticeField field(std::mt19937_64& g, const LatticeBox& box) {
  LatticeField f(box);
  for (Eigen::Index i = 0; i < f.values().size(); ++i) f.values()[i] = {uniform(g, -1, 1), uniform(g, -1, 1)};
  return f;
}

/// Random potential on `count` distinct sites of the box with values in [lo, hi].
inline Potential potential(std::mt19937_64& g, const LatticeBox& box, int count, double lo, double hi) {
  std::map<Site, double> m;
  while (static_cast<int>(m.size()) < count) m[site(g, box.dim(), box.radius())] = uniform(g, lo, hi);
  return Potential(box.dim(), m);
}

}  // namespace sparselab::testing
