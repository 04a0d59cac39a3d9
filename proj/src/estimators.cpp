#include "geom/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace geom {

namespace {

void require_finite(const Mat& m, const char* what) {
  require(m.allFinite(), std::string(what) + " must be finite");
}

}  // namespace

TangentEstimate spectral_frame(const Mat& m, const Vec& base_point, int d) {
  const auto big_d = static_cast<int>(m.rows());
  require(m.cols() == big_d, "spectral_frame: matrix must be square");
  require(d >= 1 && d < big_d, "spectral_frame: need 1 <= d < D");
  require_finite(m, "spectral_frame: matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  TangentEstimate est;
  est.eigenvalues = es.eigenvalues().reverse();
  est.eigenvectors = es.eigenvectors().rowwise().reverse();

  // Gaps at the level of eigensolver rounding count as exact ties.
  const double tie = 64 * std::numeric_limits<double>::epsilon() * est.eigenvalues.cwiseAbs().maxCoeff();
  std::vector<double> gaps(static_cast<std::size_t>(big_d - 1));
  for (int k = 0; k + 1 < big_d; ++k) {
    const double g = est.eigenvalues[k] - est.eigenvalues[k + 1];
    gaps[static_cast<std::size_t>(k)] = g > tie ? g : 0.0;
  }
  const auto best = std::max_element(gaps.begin(), gaps.end());
  est.gap_index = static_cast<int>(best - gaps.begin()) + 1;

  std::vector<double> rest;
  for (auto it = gaps.begin(); it != gaps.end(); ++it)
    if (it != best) rest.push_back(*it);
  if (rest.empty()) {
    est.confidence = std::numeric_limits<double>::infinity();
  } else {
    std::sort(rest.begin(), rest.end());
    const std::size_t n = rest.size();
    const double med = n % 2 ? rest[n / 2] : 0.5 * (rest[n / 2 - 1] + rest[n / 2]);
    est.confidence = med > 0.0 ? *best / med : std::numeric_limits<double>::infinity();
    if (*best <= 0.0) est.confidence = 0.0;
  }
  est.low_confidence = est.confidence < 2.0;
  est.frame = TangentFrame(base_point, est.eigenvectors.leftCols(d));
  return est;
}

TangentEstimate tangent_estimate(const LogDerivBundle& ld, int d) { return spectral_frame(ld.h, ld.point, d); }

DimensionEstimate dimension_estimate_full(const LogDerivBundle& ld) {
  const TangentEstimate est = spectral_frame(ld.h, ld.point, 1);
  return {est.gap_index, est.confidence, est.low_confidence};
}

int dimension_estimate(const LogDerivBundle& ld) { return dimension_estimate_full(ld).d_hat; }

SffTensor sff_umbilical(const LogDerivBundle& ld, int d, const TangentFrame& frame) {
  require(d >= 1, "sff_umbilical: d must be positive");
  require(ld.g.size() == frame.ambient_dim(), "sff_umbilical: dimension mismatch");
  SffTensor out(frame);
  const Vec diag = (2.0 / d) * ld.g;
  const Vec zero = Vec::Zero(ld.g.size());
  for (int i = 0; i < frame.dim(); ++i)
    for (int j = i; j < frame.dim(); ++j) out.set(i, j, i == j ? diag : zero);
  return out;
}

double default_c0(const ManifoldSpec& spec) {
  double min_h = std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case ManifoldKind::Torus: {
      constexpr int kGrid = 720;
      for (int i = 0; i < kGrid; ++i) {
        const double th = 2.0 * std::numbers::pi * i / kGrid;
        min_h = std::min(min_h, mean_curvature_true(spec, embed(spec, {th, 0.0})).norm());
      }
      break;
    }
    default:
      // Homogeneous spaces: |H| is the same everywhere.
      min_h = mean_curvature_true(spec, embed(spec, std::vector<double>(static_cast<std::size_t>(spec.intrinsic_dim()), 0.5))).norm();
  }
  return std::max(0.5 * 0.5 * spec.intrinsic_dim() * min_h, kBlindGradientThreshold);
}

SffTensor sff_hypersurface(const LogDerivBundle& ld, const TangentFrame& frame, double c0) {
  require(frame.ambient_dim() == frame.dim() + 1, "sff_hypersurface: codimension must be one");
  require(ld.g.size() == frame.ambient_dim(), "sff_hypersurface: dimension mismatch");
  const double gn2 = ld.g.squaredNorm();
  if (!(std::sqrt(gn2) >= c0))
    throw GeomError(ErrorCode::GradientTooSmall, "gradient norm below threshold");
  const Mat& e = frame.basis();
  const Mat q = e.transpose() * ld.h * e;
  SffTensor out(frame);
  for (int i = 0; i < frame.dim(); ++i)
    for (int j = i; j < frame.dim(); ++j) out.set(i, j, (-0.5 * (q(i, j) + q(j, i)) / gn2) * ld.g);
  return out;
}

Mat projector_derivative(const Mat& eigenvectors, const Vec& eigenvalues, const Mat& k, int d) {
  const auto big_d = static_cast<int>(eigenvalues.size());
  Mat x = Mat::Zero(big_d, big_d);
  const Mat kb = eigenvectors.transpose() * k * eigenvectors;
  for (int a = 0; a < d; ++a)
    for (int b = d; b < big_d; ++b) {
      const double coef = kb(a, b) / (eigenvalues[a] - eigenvalues[b]);
      const Vec ea = eigenvectors.col(a);
      const Vec eb = eigenvectors.col(b);
      x.noalias() += coef * (ea * eb.transpose() + eb * ea.transpose());
    }
  return x;
}

SffTensor sff_general(const LogDerivBundle& ld, int d, const TangentFrame& frame) {
  const TangentEstimate est = spectral_frame(ld.h, ld.point, d);
  const double scale = est.eigenvalues.cwiseAbs().maxCoeff();
  if (!(est.eigenvalues[d - 1] - est.eigenvalues[d] > 1e-6 * scale))
    throw GeomError(ErrorCode::EigengapCollapse, "eigengap between positions d and d+1 collapsed");
  const Mat& e = frame.basis();
  const int m = frame.dim();
  std::vector<Mat> xs;
  xs.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    xs.push_back(projector_derivative(est.eigenvectors, est.eigenvalues, ld.t.contract_first(e.col(i)), d));
  SffTensor out(frame);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const Vec v = 0.5 * (xs[static_cast<std::size_t>(i)] * e.col(j) + xs[static_cast<std::size_t>(j)] * e.col(i));
      out.set(i, j, v);
    }
  return out;
}

Vec mean_curvature_from_sff(const SffTensor& sff) {
  Vec h = Vec::Zero(sff.frame().ambient_dim());
  for (int i = 0; i < sff.dim(); ++i) h += sff.at(i, i);
  return h / sff.dim();
}

double sff_operator_error(const SffTensor& a, const SffTensor& b, Rng& rng, int samples) {
  const Mat& e = a.frame().basis();
  const int m = a.dim();
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) worst = std::max(worst, (a.apply(e.col(i), e.col(j)) - b.apply(e.col(i), e.col(j))).norm());
  Vec cu(m), cv(m);
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < m; ++k) {
      cu[k] = rng.normal();
      cv[k] = rng.normal();
    }
    if (cu.norm() < 1e-12 || cv.norm() < 1e-12) continue;
    const Vec u = e * cu.normalized();
    const Vec v = e * cv.normalized();
    worst = std::max(worst, (a.apply(u, v) - b.apply(u, v)).norm());
  }
  return worst;
}

}  // namespace geom
