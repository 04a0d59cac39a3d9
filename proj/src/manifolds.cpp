#include "geom/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double t) {
  double w = std::fmod(t, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

// Coordinates of a torus point relative to its own parameterization.
struct TorusAngles {
  double theta;
  double phi;
};

TorusAngles torus_angles(const ManifoldSpec& spec, const Vec& y) {
  const double rho = std::hypot(y[0], y[1]);
  const double scale = spec.major + spec.minor;
  if (rho <= 1e-12 * scale)
    throw GeomError(ErrorCode::DegenerateProjection, "torus: point on the symmetry axis");
  const double dz = y[2];
  const double dr = rho - spec.major;
  if (std::hypot(dr, dz) <= 1e-12 * scale)
    throw GeomError(ErrorCode::DegenerateProjection, "torus: point on the core circle");
  return {wrap_angle(std::atan2(dz, dr)), wrap_angle(std::atan2(y[1], y[0]))};
}

Vec on_manifold(const ManifoldSpec& spec, const Vec& x) {
  require(x.size() == spec.ambient_dim(), "point has wrong ambient dimension");
  Vec p = project(spec, x);
  const double tol = 1e-9 * (1.0 + x.norm());
  require((p - x).norm() <= tol, "point is not on the manifold");
  return p;
}

}  // namespace

ManifoldSpec ManifoldSpec::circle(double a) {
  require(a > 0.0, "circle radius must be positive");
  ManifoldSpec s;
  s.kind = ManifoldKind::Circle;
  s.radius = a;
  s.sphere_dim = 1;
  return s;
}

ManifoldSpec ManifoldSpec::sphere(double a, int d) {
  require(a > 0.0, "sphere radius must be positive");
  require(d >= 1, "sphere dimension must be positive");
  ManifoldSpec s;
  s.kind = ManifoldKind::Sphere;
  s.radius = a;
  s.sphere_dim = d;
  return s;
}

ManifoldSpec ManifoldSpec::torus(double major_radius, double minor_radius) {
  require(minor_radius > 0.0 && major_radius > minor_radius, "torus needs R > r > 0");
  ManifoldSpec s;
  s.kind = ManifoldKind::Torus;
  s.major = major_radius;
  s.minor = minor_radius;
  return s;
}

ManifoldSpec ManifoldSpec::clifford(double a) {
  require(a > 0.0, "clifford radius must be positive");
  ManifoldSpec s;
  s.kind = ManifoldKind::Clifford;
  s.radius = a;
  return s;
}

int ManifoldSpec::ambient_dim() const {
  switch (kind) {
    case ManifoldKind::Circle: return 2;
    case ManifoldKind::Sphere: return sphere_dim + 1;
    case ManifoldKind::Torus: return 3;
    case ManifoldKind::Clifford: return 4;
  }
  return 0;
}

int ManifoldSpec::intrinsic_dim() const {
  switch (kind) {
    case ManifoldKind::Circle: return 1;
    case ManifoldKind::Sphere: return sphere_dim;
    case ManifoldKind::Torus: return 2;
    case ManifoldKind::Clifford: return 2;
  }
  return 0;
}

double ManifoldSpec::reach() const {
  if (kind == ManifoldKind::Torus) return std::min(minor, major - minor);
  return radius;
}

double ManifoldSpec::volume() const {
  switch (kind) {
    case ManifoldKind::Circle: return kTwoPi * radius;
    case ManifoldKind::Sphere: {
      // |S^d| = 2 pi^{(d+1)/2} / Gamma((d+1)/2)
      const double n = sphere_dim + 1;
      return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0) * std::pow(radius, sphere_dim);
    }
    case ManifoldKind::Torus: return 4.0 * std::numbers::pi * std::numbers::pi * major * minor;
    case ManifoldKind::Clifford: return 4.0 * std::numbers::pi * std::numbers::pi * radius * radius;
  }
  return 0.0;
}

std::string ManifoldSpec::kind_name() const {
  switch (kind) {
    case ManifoldKind::Circle: return "circle";
    case ManifoldKind::Sphere: return "sphere";
    case ManifoldKind::Torus: return "torus";
    case ManifoldKind::Clifford: return "clifford";
  }
  return "unknown";
}

bool operator==(const ManifoldSpec& a, const ManifoldSpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ManifoldKind::Torus: return a.major == b.major && a.minor == b.minor;
    case ManifoldKind::Sphere: return a.radius == b.radius && a.sphere_dim == b.sphere_dim;
    default: return a.radius == b.radius;
  }
}

TangentFrame::TangentFrame(Vec base_point, Mat basis) : base_point_(std::move(base_point)), basis_(std::move(basis)) {
  require(basis_.rows() == base_point_.size(), "frame basis rows must match point dimension");
  require(basis_.cols() >= 1 && basis_.cols() <= basis_.rows(), "frame must have 1..D columns");
  const Mat gram = basis_.transpose() * basis_;
  const double dev = (gram - Mat::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff();
  require(dev <= 1e-9, "frame basis is not column-orthonormal");
}

Mat TangentFrame::normal_projector() const {
  return Mat::Identity(basis_.rows(), basis_.rows()) - tangent_projector();
}

Mat TangentFrame::normal_basis() const {
  const auto n = basis_.rows();
  const auto d = basis_.cols();
  if (d == n) return Mat(n, 0);
  Eigen::HouseholderQR<Mat> qr(basis_);
  const Mat q = qr.householderQ() * Mat::Identity(n, n);
  return q.rightCols(n - d);
}

SffTensor::SffTensor(TangentFrame frame) : frame_(std::move(frame)) {
  const auto d = static_cast<std::size_t>(frame_.dim());
  values_.assign(d * d, Vec::Zero(frame_.ambient_dim()));
}

void SffTensor::set(int i, int j, const Vec& v) {
  values_[static_cast<std::size_t>(i * dim() + j)] = v;
  values_[static_cast<std::size_t>(j * dim() + i)] = v;
}

Vec SffTensor::apply(const Vec& u, const Vec& v) const {
  const Vec cu = frame_.basis().transpose() * u;
  const Vec cv = frame_.basis().transpose() * v;
  Vec out = Vec::Zero(frame_.ambient_dim());
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) out += cu[i] * cv[j] * at(i, j);
  return out;
}

Vec embed(const ManifoldSpec& spec, const std::vector<double>& params) {
  require(static_cast<int>(params.size()) == spec.intrinsic_dim(), "embed: wrong number of parameters");
  Vec x(spec.ambient_dim());
  switch (spec.kind) {
    case ManifoldKind::Circle: {
      const double t = wrap_angle(params[0]);
      x << spec.radius * std::cos(t), spec.radius * std::sin(t);
      break;
    }
    case ManifoldKind::Torus: {
      const double t = wrap_angle(params[0]);
      const double f = wrap_angle(params[1]);
      const double ring = spec.major + spec.minor * std::cos(t);
      x << ring * std::cos(f), ring * std::sin(f), spec.minor * std::sin(t);
      break;
    }
    case ManifoldKind::Clifford: {
      const double t = wrap_angle(params[0]);
      const double f = wrap_angle(params[1]);
      x << std::cos(t), std::sin(t), std::cos(f), std::sin(f);
      x *= spec.radius;
      break;
    }
    case ManifoldKind::Sphere: {
      const int d = spec.sphere_dim;
      double s = spec.radius;
      for (int k = d - 1; k >= 1; --k) {
        x[k + 1] = s * std::cos(params[static_cast<std::size_t>(k)]);
        s *= std::sin(params[static_cast<std::size_t>(k)]);
      }
      const double t = wrap_angle(params[0]);
      x[0] = s * std::cos(t);
      x[1] = s * std::sin(t);
      break;
    }
  }
  return x;
}

std::vector<double> parameters_of(const ManifoldSpec& spec, const Vec& x) {
  switch (spec.kind) {
    case ManifoldKind::Circle: return {wrap_angle(std::atan2(x[1], x[0]))};
    case ManifoldKind::Torus: {
      const auto a = torus_angles(spec, x);
      return {a.theta, a.phi};
    }
    case ManifoldKind::Clifford:
      return {wrap_angle(std::atan2(x[1], x[0])), wrap_angle(std::atan2(x[3], x[2]))};
    case ManifoldKind::Sphere: {
      const int d = spec.sphere_dim;
      std::vector<double> p(static_cast<std::size_t>(d), 0.0);
      // Radius of the trailing sub-vector x[0..k+1].
      for (int k = d - 1; k >= 1; --k) {
        const double tail = std::sqrt(x.head(k + 1).squaredNorm());
        p[static_cast<std::size_t>(k)] = std::atan2(tail, x[k + 1]);
      }
      p[0] = wrap_angle(std::atan2(x[1], x[0]));
      return p;
    }
  }
  return {};
}

std::vector<Vec> sample_uniform(const ManifoldSpec& spec, std::size_t n, Rng& rng) {
  require(n >= 1, "sample_uniform: n must be at least 1");
  std::vector<Vec> out;
  out.reserve(n);
  const int big_d = spec.ambient_dim();
  for (std::size_t i = 0; i < n; ++i) {
    switch (spec.kind) {
      case ManifoldKind::Circle: out.push_back(embed(spec, {rng.uniform(0.0, kTwoPi)})); break;
      case ManifoldKind::Clifford: {
        const double t = rng.uniform(0.0, kTwoPi);
        const double f = rng.uniform(0.0, kTwoPi);
        out.push_back(embed(spec, {t, f}));
        break;
      }
      case ManifoldKind::Torus: {
        // Area element r (R + r cos theta): accept theta with probability
        // (R + r cos theta) / (R + r).
        double t;
        for (;;) {
          t = rng.uniform(0.0, kTwoPi);
          const double accept = (spec.major + spec.minor * std::cos(t)) / (spec.major + spec.minor);
          if (rng.uniform() < accept) break;
        }
        const double f = rng.uniform(0.0, kTwoPi);
        out.push_back(embed(spec, {t, f}));
        break;
      }
      case ManifoldKind::Sphere: {
        Vec g(big_d);
        double norm;
        do {
          for (int k = 0; k < big_d; ++k) g[k] = rng.normal();
          norm = g.norm();
        } while (norm < 1e-300);
        out.push_back(spec.radius * g / norm);
        break;
      }
    }
  }
  return out;
}

Vec project(const ManifoldSpec& spec, const Vec& y) {
  require(y.size() == spec.ambient_dim(), "project: wrong ambient dimension");
  switch (spec.kind) {
    case ManifoldKind::Circle:
    case ManifoldKind::Sphere: {
      const double n = y.norm();
      if (n <= 1e-12 * spec.radius)
        throw GeomError(ErrorCode::DegenerateProjection, "point at the centre of the sphere");
      return spec.radius * y / n;
    }
    case ManifoldKind::Torus: {
      const auto a = torus_angles(spec, y);
      return embed(spec, {a.theta, a.phi});
    }
    case ManifoldKind::Clifford: {
      const double n1 = std::hypot(y[0], y[1]);
      const double n2 = std::hypot(y[2], y[3]);
      if (n1 <= 1e-12 * spec.radius || n2 <= 1e-12 * spec.radius)
        throw GeomError(ErrorCode::DegenerateProjection, "clifford: a coordinate pair vanishes");
      Vec x(4);
      x << y[0] / n1, y[1] / n1, y[2] / n2, y[3] / n2;
      return spec.radius * x;
    }
  }
  return y;
}

TangentFrame tangent_frame(const ManifoldSpec& spec, const Vec& x_in) {
  const Vec x = on_manifold(spec, x_in);
  const int big_d = spec.ambient_dim();
  const int d = spec.intrinsic_dim();
  Mat basis(big_d, d);
  switch (spec.kind) {
    case ManifoldKind::Circle: basis.col(0) << -x[1] / spec.radius, x[0] / spec.radius; break;
    case ManifoldKind::Torus: {
      const auto a = torus_angles(spec, x);
      basis.col(0) << -std::sin(a.theta) * std::cos(a.phi), -std::sin(a.theta) * std::sin(a.phi), std::cos(a.theta);
      basis.col(1) << -std::sin(a.phi), std::cos(a.phi), 0.0;
      break;
    }
    case ManifoldKind::Clifford: {
      const double t = std::atan2(x[1], x[0]);
      const double f = std::atan2(x[3], x[2]);
      basis.col(0) << -std::sin(t), std::cos(t), 0.0, 0.0;
      basis.col(1) << 0.0, 0.0, -std::sin(f), std::cos(f);
      break;
    }
    case ManifoldKind::Sphere: {
      // Parameter partials degenerate at the poles; use the orthogonal
      // complement of the radial direction instead.
      const Mat radial = x / spec.radius;
      Eigen::HouseholderQR<Mat> qr(radial);
      const Mat q = qr.householderQ() * Mat::Identity(big_d, big_d);
      basis = q.rightCols(d);
      break;
    }
  }
  return TangentFrame(x, basis);
}

SffTensor sff_true(const ManifoldSpec& spec, const Vec& x_in) {
  TangentFrame frame = tangent_frame(spec, x_in);
  const Vec& x = frame.base_point();
  SffTensor sff(frame);
  const int big_d = spec.ambient_dim();
  switch (spec.kind) {
    case ManifoldKind::Circle:
    case ManifoldKind::Sphere: {
      const Vec diag = -x / (spec.radius * spec.radius);
      for (int i = 0; i < spec.intrinsic_dim(); ++i) sff.set(i, i, diag);
      break;
    }
    case ManifoldKind::Clifford: {
      Vec r1 = Vec::Zero(big_d), r2 = Vec::Zero(big_d);
      r1.head(2) = x.head(2) / spec.radius;
      r2.tail(2) = x.tail(2) / spec.radius;
      sff.set(0, 0, -r1 / spec.radius);
      sff.set(1, 1, -r2 / spec.radius);
      break;
    }
    case ManifoldKind::Torus: {
      // Outward tube normal n; normal curvatures 1/r and cos t / (R + r cos t).
      const auto a = torus_angles(spec, x);
      Vec n(3);
      n << std::cos(a.theta) * std::cos(a.phi), std::cos(a.theta) * std::sin(a.phi), std::sin(a.theta);
      const double k_theta = 1.0 / spec.minor;
      const double k_phi = std::cos(a.theta) / (spec.major + spec.minor * std::cos(a.theta));
      sff.set(0, 0, -k_theta * n);
      sff.set(1, 1, -k_phi * n);
      break;
    }
  }
  return sff;
}

Vec mean_curvature_true(const ManifoldSpec& spec, const Vec& x) {
  const SffTensor sff = sff_true(spec, x);
  Vec h = Vec::Zero(spec.ambient_dim());
  for (int i = 0; i < sff.dim(); ++i) h += sff.at(i, i);
  return h / sff.dim();
}

double default_fd_step(const ManifoldSpec& spec) { return 1e-4 * spec.reach(); }

SffTensor sff_fd_oracle(const ManifoldSpec& spec, const Vec& x_in, double step) {
  require(step > 0.0 && std::isfinite(step), "sff_fd_oracle: step must be positive");
  TangentFrame frame = tangent_frame(spec, x_in);
  const Vec& x = frame.base_point();
  const int d = frame.dim();
  auto projector_at = [&](const Vec& y) { return tangent_frame(spec, project(spec, y)).tangent_projector(); };
  std::vector<Mat> dp(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const Vec u = frame.basis().col(i);
    dp[static_cast<std::size_t>(i)] = (projector_at(x + step * u) - projector_at(x - step * u)) / (2.0 * step);
  }
  SffTensor sff(frame);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const Vec a = dp[static_cast<std::size_t>(i)] * frame.basis().col(j);
      const Vec b = dp[static_cast<std::size_t>(j)] * frame.basis().col(i);
      sff.set(i, j, 0.5 * (a + b));
    }
  return sff;
}

Mat a_matrix(const ManifoldSpec& spec, const Vec& y) {
  const Vec x = project(spec, y);
  const Vec v = y - x;
  const SffTensor sff = sff_true(spec, x);
  const int d = sff.dim();
  Mat a = Mat::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) -= v.dot(sff.at(i, j));
  return a;
}

namespace {

struct ArcSetup {
  Vec start_dir;  // x1 / a
  Vec toward;     // unit tangent at x1 pointing to x2
  double angle;   // central angle
};

ArcSetup arc_setup(const ManifoldSpec& spec, const Vec& x1_in, const Vec& x2_in) {
  require(spec.kind == ManifoldKind::Circle || spec.kind == ManifoldKind::Sphere,
          "analytic geodesics exist only for circle and sphere");
  const Vec x1 = on_manifold(spec, x1_in);
  const Vec x2 = on_manifold(spec, x2_in);
  const double a = spec.radius;
  ArcSetup s;
  s.start_dir = x1 / a;
  const Vec e2 = x2 / a;
  const double c = std::clamp(s.start_dir.dot(e2), -1.0, 1.0);
  if (c <= -1.0 + 1e-12) throw GeomError(ErrorCode::NonUniqueGeodesic, "antipodal endpoints");
  const Vec perp = e2 - c * s.start_dir;
  const double pn = perp.norm();
  s.angle = std::atan2(pn, c);
  s.toward = pn > 0.0 ? Vec(perp / pn) : Vec(Vec::Zero(x1.size()));
  return s;
}

}  // namespace

std::vector<Vec> geodesic_arc(const ManifoldSpec& spec, const Vec& x1, const Vec& x2, std::size_t n_pts) {
  require(n_pts >= 2, "geodesic_arc: need at least two points");
  const ArcSetup s = arc_setup(spec, x1, x2);
  std::vector<Vec> pts;
  pts.reserve(n_pts);
  for (std::size_t k = 0; k < n_pts; ++k) {
    const double t = s.angle * static_cast<double>(k) / static_cast<double>(n_pts - 1);
    pts.push_back(spec.radius * (std::cos(t) * s.start_dir + std::sin(t) * s.toward));
  }
  pts.front() = project(spec, x1);
  pts.back() = project(spec, x2);
  return pts;
}

std::vector<CurveJet> geodesic_jet(const ManifoldSpec& spec, const Vec& x1, const Vec& x2, std::size_t n_pts) {
  require(n_pts >= 2, "geodesic_jet: need at least two points");
  const ArcSetup s = arc_setup(spec, x1, x2);
  const double a = spec.radius;
  std::vector<CurveJet> jets;
  jets.reserve(n_pts);
  for (std::size_t k = 0; k < n_pts; ++k) {
    const double t = s.angle * static_cast<double>(k) / static_cast<double>(n_pts - 1);
    CurveJet j;
    j.position = a * (std::cos(t) * s.start_dir + std::sin(t) * s.toward);
    j.velocity = -std::sin(t) * s.start_dir + std::cos(t) * s.toward;
    j.acceleration = -j.position / (a * a);
    jets.push_back(std::move(j));
  }
  return jets;
}

}  // namespace geom
