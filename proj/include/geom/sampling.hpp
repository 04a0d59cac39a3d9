#pragma once

#include "geom/manifolds.hpp"

#include <iosfwd>
#include <string>

namespace geom {

struct SampleSet {
  std::vector<Vec> points;
  double sigma = 0.0;
  ManifoldSpec spec;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

/// y_i = x_i + xi_i with xi_i ~ N(0, sigma^2 I).
SampleSet add_noise(const std::vector<Vec>& clean, double sigma, Rng& rng);

/// Evaluation point off M with its ground truth at the foot point.
struct EvalPoint {
  Vec w;
  Vec foot;  // pi(w)
  TangentFrame frame;
  Vec mean_curvature;
  double offset = 0.0;  // d(w, M)
};

struct AnnulusOptions {
  double c1 = 0.5;
  double c2 = 2.0;
  std::size_t nbar = 50;
};

/// Annulus radii [c1, c2] * sigma^2 log(1/sigma). sigma == 1 collapses the
/// band onto M.
std::pair<double, double> annulus_radii(double sigma, const AnnulusOptions& opts);

/// w = x + rho nu with x uniform on M, nu uniform on the unit normal sphere
/// at x and rho uniform on the annulus radii.
std::vector<EvalPoint> eval_annulus(const ManifoldSpec& spec, double sigma, const AnnulusOptions& opts, Rng& rng);

/// Point file: one JSON header line {"D","d","sigma","seed","kind",...}
/// followed by one CSV row per point.
void write_points(std::ostream& os, const SampleSet& samples);
SampleSet read_points(std::istream& is);

}  // namespace geom
