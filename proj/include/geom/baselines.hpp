#pragma once

#include "geom/estimators.hpp"
#include "geom/sampling.hpp"

namespace geom {

struct LpcaConfig {
  double h = 1.0;
  int d = 1;
};

/// h = c N^{-1 / (d + 4)}.
double lpca_bandwidth(double c, std::size_t n, int d);

/// Top-d eigenvectors of the Gaussian-weighted covariance about the
/// weighted mean. Throws InsufficientLocalMass when sum w / max w < d + 1.
TangentEstimate lpca_tangent(const std::vector<Vec>& samples, const Vec& y, const LpcaConfig& cfg);
TangentEstimate lpca_tangent(const SampleSet& samples, const Vec& y, const LpcaConfig& cfg);

}  // namespace geom
