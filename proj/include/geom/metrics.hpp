#pragma once

#include "geom/logderiv.hpp"

#include <functional>
#include <iosfwd>
#include <string>

namespace geom {

/// Discrete path; points.front() and points.back() are the fixed endpoints.
struct GeodesicPath {
  std::vector<Vec> points;
  std::pair<Vec, Vec> fixed_endpoints;
  /// Objective after initialization and after every accepted step.
  std::vector<double> objective_history;
  double softening = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// The gradient of log P at a point, with its Hessian when requested.
struct ScoreSample {
  Vec g;
  Mat h;
};
using ScoreField = std::function<ScoreSample(const Vec& y, bool need_hessian)>;
using GradientField = std::function<Vec(const Vec& y)>;

/// Midpoint-rule length under the rank-one metric <u, grad log P>^2.
double degenerate_length(const std::vector<Vec>& path, const GradientField& grad_log_p);

struct GeodesicOptions {
  int steps = 2000;
  /// Initial trial step; 0 selects 0.1 sigma^2 from `sigma`.
  double step_size = 0.0;
  double sigma = 0.05;
  /// Softening weight. A negative value selects 1e-3 times the mean of
  /// |G|^2 over the initial segment midpoints; that relative rule keeps the
  /// penalty's share of the objective fixed as sigma shrinks.
  double softening = 1e-3;
  double tolerance = 1e-8;
  int history = 8;  // quasi-Newton memory
};

/// Minimizes sum_i <D_i, G(m_i)>^2 + eps |D_i|^2 over the interior points,
/// starting from the straight chord. Every accepted step lowers the
/// objective. Throws NonFiniteObjective when the field is not finite on
/// the initial path.
GeodesicPath optimize_geodesic(const Vec& a, const Vec& b, std::size_t n_interior, const ScoreField& field,
                               const GeodesicOptions& options = {});

/// Coefficients C(m, i, j) = h_ij g_m / |g|^2. GradientTooSmall at |g| < 1e-8.
Tensor3 christoffel_degenerate(const LogDerivBundle& ld);

/// Conformal coefficients C(k, i, j) = d_ik df_j + d_jk df_i - d_ij df_k with
/// df = (2 / d) g.
Tensor3 christoffel_conformal(const LogDerivBundle& ld, int d);

using ChristoffelField = std::function<Tensor3(const Vec& y)>;

/// max_t |acc + C(vel, vel)| along the supplied jets.
double acceleration_residual(const std::vector<CurveJet>& curve, const ChristoffelField& gamma);

/// Symmetric Hausdorff distance between two finite point sets.
double hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b);

/// One row per point (x1..xD) after a comment header naming the endpoints
/// and the config hash.
void write_path_csv(std::ostream& os, const GeodesicPath& path, const std::string& endpoint_ids,
                    const std::string& config_hash);

}  // namespace geom
