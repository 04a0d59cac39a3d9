#pragma once

#include "geom/rng.hpp"
#include "geom/types.hpp"

#include <string>
#include <vector>

namespace geom {

enum class ManifoldKind { Circle, Sphere, Torus, Clifford };

/// Analytic ground-truth submanifold.
///
/// Parameterizations (angles are wrapped into [0, 2pi) where periodic):
///   circle(a)          theta            -> a (cos t, sin t)
///   sphere(a, d)       theta, phi_1..   -> hyperspherical, d = 2 gives
///                                          a (sin p cos t, sin p sin t, cos p)
///   torus(R, r)        theta, phi       -> ((R + r cos t) cos f, (R + r cos t) sin f, r sin t)
///   clifford(a)        theta, phi       -> a (cos t, sin t, cos f, sin f)
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Torus;
  double radius = 1.0;  // circle, sphere, clifford
  double major = 2.0;   // torus R
  double minor = 1.0;   // torus r
  int sphere_dim = 2;

  static ManifoldSpec circle(double a = 1.0);
  static ManifoldSpec sphere(double a = 1.0, int d = 2);
  static ManifoldSpec torus(double major_radius = 2.0, double minor_radius = 1.0);
  static ManifoldSpec clifford(double a = 1.0);

  int ambient_dim() const;
  int intrinsic_dim() const;
  int codim() const { return ambient_dim() - intrinsic_dim(); }
  double reach() const;
  /// Induced volume V_M.
  double volume() const;
  std::string kind_name() const;
};

bool operator==(const ManifoldSpec& a, const ManifoldSpec& b);

/// Base point together with a column-orthonormal D x d basis of T_xM.
class TangentFrame {
 public:
  TangentFrame() = default;
  /// Throws InvalidArgument unless basis is column-orthonormal to 1e-9.
  TangentFrame(Vec base_point, Mat basis);

  const Vec& base_point() const noexcept { return base_point_; }
  const Mat& basis() const noexcept { return basis_; }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }

  Mat tangent_projector() const { return basis_ * basis_.transpose(); }
  Mat normal_projector() const;
  /// Orthonormal D x (D - d) basis of the complement.
  Mat normal_basis() const;

 private:
  Vec base_point_;
  Mat basis_;
};

/// Symmetric bilinear map T_xM x T_xM -> R^D stored on the frame grid.
class SffTensor {
 public:
  SffTensor() = default;
  explicit SffTensor(TangentFrame frame);

  const TangentFrame& frame() const noexcept { return frame_; }
  int dim() const { return frame_.dim(); }

  const Vec& at(int i, int j) const { return values_[static_cast<std::size_t>(i * dim() + j)]; }
  /// Sets both (i, j) and (j, i).
  void set(int i, int j, const Vec& v);

  /// Pi(u, v) for ambient vectors u, v, read through the frame.
  Vec apply(const Vec& u, const Vec& v) const;

 private:
  TangentFrame frame_;
  std::vector<Vec> values_;
};

Vec embed(const ManifoldSpec& spec, const std::vector<double>& params);

/// Inverse of embed for a point on M.
std::vector<double> parameters_of(const ManifoldSpec& spec, const Vec& x);

std::vector<Vec> sample_uniform(const ManifoldSpec& spec, std::size_t n, Rng& rng);

/// Nearest point of M. Throws DegenerateProjection where it is not unique.
Vec project(const ManifoldSpec& spec, const Vec& y);

TangentFrame tangent_frame(const ManifoldSpec& spec, const Vec& x);

SffTensor sff_true(const ManifoldSpec& spec, const Vec& x);
Vec mean_curvature_true(const ManifoldSpec& spec, const Vec& x);

/// 1e-4 times the smallest curvature radius.
double default_fd_step(const ManifoldSpec& spec);

/// Pi(u, v) from central differences of the exact tangent projector field
/// y -> P_T(pi(y)) along frame directions.
SffTensor sff_fd_oracle(const ManifoldSpec& spec, const Vec& x, double step);

/// Matrix of A_y = I - <v_y, Pi_{pi(y)}> in the frame at pi(y).
Mat a_matrix(const ManifoldSpec& spec, const Vec& y);

/// Shorter great arc from x1 to x2 with n_pts points including endpoints.
std::vector<Vec> geodesic_arc(const ManifoldSpec& spec, const Vec& x1, const Vec& x2, std::size_t n_pts);

struct CurveJet {
  Vec position;
  Vec velocity;
  Vec acceleration;
};

/// Unit-speed parameterization of the same arc, sampled at n_pts equally
/// spaced arclengths with exact first and second derivatives.
std::vector<CurveJet> geodesic_jet(const ManifoldSpec& spec, const Vec& x1, const Vec& x2, std::size_t n_pts);

}  // namespace geom
