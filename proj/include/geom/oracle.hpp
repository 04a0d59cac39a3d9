#pragma once

#include "geom/manifolds.hpp"

#include <memory>

namespace geom {

/// P and its ambient derivative tensors of orders 1-3 at `point`.
struct DerivativeBundle {
  double p = 0.0;
  Vec g1;
  Mat g2;
  Tensor3 g3;
  Vec point;
  double sigma = 0.0;
};

struct OracleOptions {
  /// Nodes per parameter angle; 0 picks a resolution from sigma so the
  /// finest Gaussian footprint spans at least ~1.4 nodes.
  int grid_res = 0;
  /// Recompute at twice the resolution and fail with
  /// QuadratureUnderResolved when p moves by more than 1e-8 relative.
  bool self_check = false;
};

/// Quadrature nodes on M with weights that integrate against the uniform
/// probability measure P_M (area element and 1 / V_M folded in).
struct QuadratureGrid {
  int ambient_dim = 0;
  std::vector<double> coords;  // node-major: coords[n * D + k]
  std::vector<double> weights;
  std::vector<int> resolution;  // nodes per parameter axis

  std::size_t size() const { return weights.size(); }
};

/// Trapezoid rule on periodic angles, Gauss-Legendre on sphere polar angles.
QuadratureGrid build_grid(const ManifoldSpec& spec, const std::vector<int>& resolution);

/// Per-axis resolution the oracle uses for (spec, sigma, grid_res).
std::vector<int> oracle_resolution(const ManifoldSpec& spec, double sigma, int grid_res);

/// Gaussian-convolved uniform density P_sigma = P_M * N(0, sigma^2 I) by
/// quadrature. Construction builds the grid once; queries are const and
/// safe to call concurrently.
class PopulationOracle {
 public:
  PopulationOracle(ManifoldSpec spec, double sigma, OracleOptions options = {});

  const ManifoldSpec& spec() const noexcept { return spec_; }
  double sigma() const noexcept { return sigma_; }
  const QuadratureGrid& grid() const noexcept { return *grid_; }

  DerivativeBundle bundle(const Vec& y) const;
  double density(const Vec& y) const;

 private:
  ManifoldSpec spec_;
  double sigma_;
  OracleOptions options_;
  std::shared_ptr<const QuadratureGrid> grid_;
  std::shared_ptr<const QuadratureGrid> check_grid_;
};

DerivativeBundle oracle_bundle(const ManifoldSpec& spec, const Vec& y, double sigma, int grid_res = 0);

DerivativeBundle evaluate_bundle(const QuadratureGrid& grid, const Vec& y, double sigma);
double evaluate_density(const QuadratureGrid& grid, const Vec& y, double sigma);

/// Distance t >= 0 along x + t * direction at which P_sigma returns to
/// P_sigma(x). Throws NoCrossing when the density stays below P(x) along
/// the probed ray, InvalidArgument when direction is not a unit normal.
double level_set_probe(const PopulationOracle& oracle, const Vec& x, const Vec& direction);

/// Same probe building the oracle on the fly; sigma == 0 returns 0 since
/// the level set through x is then M itself.
double level_set_probe(const ManifoldSpec& spec, double sigma, const Vec& x, const Vec& direction, int grid_res = 0);

/// Harness form: supremum over the probed unit normals; directions with no
/// crossing contribute 0.
double level_set_distance(const PopulationOracle& oracle, const Vec& x, const std::vector<Vec>& directions);

}  // namespace geom
