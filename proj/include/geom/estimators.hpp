#pragma once

#include "geom/logderiv.hpp"

namespace geom {

struct TangentEstimate {
  TangentFrame frame;
  Vec eigenvalues;   // descending
  Mat eigenvectors;  // columns match eigenvalues
  int gap_index = 0; // 1-based k maximizing lambda_k - lambda_{k+1}
  /// Largest gap over the median of the remaining gaps; +inf when D = 2.
  double confidence = 0.0;
  bool low_confidence = false;
};

/// Top-d eigenvectors of a symmetric matrix, with the gap statistics.
/// Ties keep the order returned by the decomposition.
TangentEstimate spectral_frame(const Mat& m, const Vec& base_point, int d);

TangentEstimate tangent_estimate(const LogDerivBundle& ld, int d);

struct DimensionEstimate {
  int d_hat = 0;
  double confidence = 0.0;
  bool low_confidence = false;
};

DimensionEstimate dimension_estimate_full(const LogDerivBundle& ld);
int dimension_estimate(const LogDerivBundle& ld);

/// Pi(u, v) = (2 / d) <u, v> G on the frame.
SffTensor sff_umbilical(const LogDerivBundle& ld, int d, const TangentFrame& frame);

/// Gradient-norm threshold for blind use.
inline constexpr double kBlindGradientThreshold = 1e-3;

/// 0.5 (d / 2) min_M |H_x|, floored at the blind value. The minimum is
/// taken over a parameter grid.
double default_c0(const ManifoldSpec& spec);

/// Pi(u, v) = -<H u, v> G / |G|^2. Codimension one only.
SffTensor sff_hypersurface(const LogDerivBundle& ld, const TangentFrame& frame, double c0 = kBlindGradientThreshold);

/// Derivative along u of the spectral projector onto the top-d eigenspace
/// of ld.h, given the contracted third derivative K = T(u, ., .).
Mat projector_derivative(const Mat& eigenvectors, const Vec& eigenvalues, const Mat& k, int d);

/// Pi(u, v) = X_u v through the spectral projector derivative, evaluated on
/// the columns of `frame` and symmetrized.
SffTensor sff_general(const LogDerivBundle& ld, int d, const TangentFrame& frame);

Vec mean_curvature_from_sff(const SffTensor& sff);

/// max |A(u, v) - B(u, v)| over random unit tangent pairs in A's frame plus
/// all frame column pairs. Approximates the operator norm of A - B.
double sff_operator_error(const SffTensor& a, const SffTensor& b, Rng& rng, int samples = 10000);

}  // namespace geom
