#include "sparselab/wave_probe.hpp"

#include <cmath>

#include "sparselab/errors.hpp"

namespace sparselab {

Coord field_extent(const LatticeField& f, double cutoff) {
  const auto& v = f.values();
  const double peak = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  Coord extent = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cutoff * peak) {
      extent = std::max(extent, f.box().site(static_cast<std::size_t>(i)).norm_inf());
    }
  }
  return extent;
}

WaveProbeReport wave_operator_probe(const Potential& V, const LatticeField& f, const std::vector<double>& times,
                                    WaveProbeOptions options) {
  const LatticeBox& box = f.box();
  PropagatorSpec spec{times, options.tolerance, box.radius(), box.dim()};
  spec.validate();
  if (box.boundary() != Boundary::periodic) throw ConfigError("wave_operator_probe: needs a periodic box");
  if (std::abs(f.norm() - 1.0) > 1e-12) throw ConfigError("wave_operator_probe: f must have unit norm");

  WaveProbeReport report;
  report.initial_extent = field_extent(f, options.support_cutoff);
  report.front_reach = report.initial_extent + static_cast<Coord>(std::ceil(2.0 * box.dim() * times.back()));
  if (report.front_reach + options.margin > box.radius()) {
    throw GeometryError("wave_operator_probe: wavefront reaches |n|_inf = " + std::to_string(report.front_reach) +
                        " but the box radius is " + std::to_string(box.radius()) + " with margin " +
                        std::to_string(options.margin));
  }

  const BoxOperator H(box, V);
  ChebyshevOptions cheb{options.tolerance, 200000};
  Eigen::VectorXcd previous = f.values();
  for (double t : times) {
    LatticeField w = full_propagate(H, free_propagate(f, t), t, cheb);
    WaveProbeStep step;
    step.t = t;
    step.norm = w.norm();
    step.increment = (w.values() - previous).norm();
    previous = w.values();
    if (options.keep_states) step.state = std::move(w);
    report.steps.push_back(std::move(step));
  }
  return report;
}

}  // namespace sparselab
