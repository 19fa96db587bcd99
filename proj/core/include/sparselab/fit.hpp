#pragma once

#include <span>

namespace sparselab {

/// Ordinary least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;       ///< root-mean-square residual
  double r2_deficit = 0.0; ///< 1 - R^2: unexplained fraction of the variance
  int points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace sparselab
