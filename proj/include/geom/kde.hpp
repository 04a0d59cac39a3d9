#pragma once

#include "geom/oracle.hpp"
#include "geom/sampling.hpp"

#include <array>

namespace geom {

/// h[m] is the bandwidth used for the order-m derivative tensor.
struct BandwidthPlan {
  double c = 1.0;
  std::array<double, 4> h{1.0, 1.0, 1.0, 1.0};

  /// h_m = c ((log N) / N)^{1 / (D + 4 + 2m)} for every order.
  static BandwidthPlan per_order(double c, double n, int ambient_dim);
  /// Every order evaluated at one bandwidth.
  static BandwidthPlan shared(double h);
};

/// Scott-rule constant: mean of sqrt(lambda_i) over the d largest
/// eigenvalues of the sample covariance.
double scott_constant(const std::vector<Vec>& points, int d);
double scott_constant(const SampleSet& samples, int d);

double bandwidth(double c, int order, double n, int ambient_dim);

/// Gaussian-kernel estimates of P and its derivatives up to order 3,
/// brute-force summation over the samples.
class KernelEstimator {
 public:
  explicit KernelEstimator(const std::vector<Vec>& points);

  std::size_t size() const noexcept { return n_; }
  int ambient_dim() const noexcept { return dim_; }

  DerivativeBundle bundle(const Vec& y, const BandwidthPlan& plan, int max_order = 3) const;
  double density(const Vec& y, double h) const;

 private:
  std::size_t n_ = 0;
  int dim_ = 0;
  Eigen::ArrayXXd coords_;  // D x N
};

DerivativeBundle kde_bundle(const SampleSet& samples, const Vec& y, const BandwidthPlan& plan);

}  // namespace geom
