#pragma once

#include <vector>

#include "sparselab/box_operator.hpp"
#include "sparselab/lattice.hpp"

namespace sparselab {

struct PropagatorSpec {
  std::vector<double> times;  ///< strictly increasing, positive
  double tolerance = 1e-10;   ///< in (0, 1e-4]
  Coord radius = 0;
  int dim = 1;

  LatticeBox box() const { return LatticeBox(dim, radius, Boundary::periodic); }
  /// Throws ConfigError on a bad grid or tolerance.
  void validate() const;
};

/// e^{itH0} f on a periodic box, by DFT: exact up to roundoff.
LatticeField free_propagate(const LatticeField& f, double t);

struct ChebyshevOptions {
  double tolerance = 1e-10;
  int max_terms = 200000;
};

/// e^{-itH} f by Chebyshev expansion on H.spectral_bounds(). The series stops
/// once k > t * halfwidth and |J_k(t * halfwidth)| < tolerance / 10.
LatticeField full_propagate(const BoxOperator& H, const LatticeField& f, double t, ChebyshevOptions options = {});

/// Number of Chebyshev terms full_propagate would use.
int chebyshev_terms(const BoxOperator& H, double t, ChebyshevOptions options = {});

}  // namespace sparselab
