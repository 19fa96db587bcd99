#pragma once

#include <vector>

#include "sparselab/box_operator.hpp"
#include "sparselab/propagate.hpp"

namespace sparselab {

struct WaveProbeOptions {
  double tolerance = 1e-10;   ///< Chebyshev tolerance
  Coord margin = 4;           ///< sites kept free between wavefront and edge
  double support_cutoff = 1e-12;  ///< |f| below cutoff * max|f| counts as empty
  bool keep_states = false;
};

struct WaveProbeStep {
  double t = 0.0;
  double norm = 0.0;       ///< |W(t) f|
  double increment = 0.0;  ///< |W(t) f - W(t_prev) f|; the first step compares with f
  LatticeField state{LatticeBox(1, 0)};  ///< W(t) f when keep_states, else a 1-site placeholder
};

struct WaveProbeReport {
  std::vector<WaveProbeStep> steps;
  Coord initial_extent = 0;  ///< largest |n|_inf with |f(n)| above the cutoff
  Coord front_reach = 0;     ///< initial_extent + ceil(2 d t_max)
};

/// Largest |n|_inf over sites where |f| exceeds cutoff * max|f|.
Coord field_extent(const LatticeField& f, double cutoff);

/// W(t) f = e^{-itH} e^{itH0} f on the periodic box of f for each time. Throws
/// GeometryError when the free wavefront, moving at speed at most 2d, would come
/// within `margin` sites of the edge.
WaveProbeReport wave_operator_probe(const Potential& V, const LatticeField& f, const std::vector<double>& times,
                                    WaveProbeOptions options = {});

}  // namespace sparselab
