#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace geom;
using geom::test::vec;

namespace {

LogDerivBundle synthetic(const Vec& g, const Mat& h) {
  LogDerivBundle ld;
  ld.g = g;
  ld.h = h;
  ld.t = Tensor3(static_cast<std::size_t>(g.size()));
  ld.point = Vec::Zero(g.size());
  return ld;
}

Mat random_symmetric(int n, Rng& rng) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return 0.5 * (a + a.transpose());
}

Mat top_projector(const Mat& h, int d) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const Mat v = es.eigenvectors().rightCols(d);
  return v * v.transpose();
}

/// Projector derivative from the commutator equation H X - X H = P K - K P
/// plus the block constraints P X P = 0 and Q X Q = 0, solved in Kronecker
/// form by least squares.
Mat kronecker_projector_derivative(const Mat& h, const Mat& k, int d) {
  const auto n = h.rows();
  const Mat i = Mat::Identity(n, n);
  const Mat p = top_projector(h, d), q = i - p;
  auto kron = [](const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
  };
  // Column-major vec: vec(A X B) = (B^T kron A) vec(X).
  const Mat rows_comm = kron(i, h) - kron(h.transpose(), i);
  const Mat rows_p = kron(p.transpose(), p), rows_q = kron(q.transpose(), q);
  Mat sys(3 * n * n, n * n);
  sys << rows_comm, rows_p, rows_q;
  Vec rhs = Vec::Zero(3 * n * n);
  const Mat c = p * k - k * p;
  rhs.head(n * n) = Eigen::Map<const Vec>(c.data(), n * n);
  const Vec x = sys.completeOrthogonalDecomposition().solve(rhs);
  return Eigen::Map<const Mat>(x.data(), n, n);
}

}  // namespace

TEST(Tangent, DiagonalExample) {
  Mat h = Mat::Zero(2, 2);
  h.diagonal() << -1, -100;
  const TangentEstimate t = tangent_estimate(synthetic(Vec::Zero(2), h), 1);
  EXPECT_NEAR(std::abs(t.frame.basis()(0, 0)), 1.0, 1e-14);
  EXPECT_EQ(t.gap_index, 1);
  EXPECT_DOUBLE_EQ(t.eigenvalues[0], -1);
  EXPECT_DOUBLE_EQ(t.eigenvalues[1], -100);
}

TEST(Tangent, ScaleInvariance) {
  Rng rng(1);
  const Mat h = random_symmetric(4, rng);
  const TangentEstimate a = tangent_estimate(synthetic(Vec::Zero(4), h), 2);
  const TangentEstimate b = tangent_estimate(synthetic(Vec::Zero(4), 3.7 * h), 2);
  EXPECT_LT(err_tan(a.frame.basis(), b.frame.basis()), 1e-12);
  EXPECT_EQ(a.gap_index, b.gap_index);
}

TEST(Tangent, RotationEquivariance) {
  Rng rng(2);
  for (int dim : {3, 4}) {
    const Mat q = test::random_rotation(dim, rng);
    const Mat h = random_symmetric(dim, rng);
    const TangentEstimate a = tangent_estimate(synthetic(Vec::Zero(dim), h), 2);
    const TangentEstimate b = tangent_estimate(synthetic(Vec::Zero(dim), q * h * q.transpose()), 2);
    EXPECT_LT(err_tan(q * a.frame.basis(), b.frame.basis()), 1e-8);
    EXPECT_LT((a.eigenvalues - b.eigenvalues).norm(), 1e-10);
  }
}

TEST(Tangent, TorusOracleAccuracy) {
  const ManifoldSpec spec = ManifoldSpec::torus();
  Rng rng(3);
  const PopulationOracle o(spec, 0.05);
  std::vector<double> errs;
  for (const EvalPoint& p : eval_annulus(spec, 0.05, {}, rng)) {
    const TangentEstimate t = tangent_estimate(log_bundle(o.bundle(p.w)), 2);
    errs.push_back(err_tan(p.frame, t.frame));
  }
  EXPECT_LE(*std::max_element(errs.begin(), errs.end()), 0.05);
}

TEST(Tangent, CliffordGapIndexIsTwo) {
  const ManifoldSpec spec = ManifoldSpec::clifford();
  for (double s : {0.1, 0.05}) {
    Rng rng(4);
    const PopulationOracle o(spec, s);
    for (const EvalPoint& p : eval_annulus(spec, s, {}, rng))
      EXPECT_EQ(tangent_estimate(log_bundle(o.bundle(p.w)), 2).gap_index, 2);
  }
}

TEST(Dimension, DiagonalExample) {
  Mat h = Mat::Zero(3, 3);
  h.diagonal() << 0, -10, -10;
  EXPECT_EQ(dimension_estimate(synthetic(Vec::Zero(3), h)), 1);
}

TEST(Dimension, IsotropicIsLowConfidence) {
  // An isotropic Gaussian has no gap; the stable argmax is returned and flagged.
  const KernelEstimator k({Vec::Zero(4)});
  const DimensionEstimate d = dimension_estimate_full(log_bundle(k.bundle(vec({0.1, 0.2, 0.3, 0.4}), BandwidthPlan::shared(0.5))));
  EXPECT_GE(d.d_hat, 1);
  EXPECT_LE(d.d_hat, 3);
  EXPECT_TRUE(d.low_confidence);
}

TEST(Dimension, TorusOracle) {
  const ManifoldSpec spec = ManifoldSpec::torus();
  Rng rng(5);
  const PopulationOracle o(spec, 0.05);
  for (const EvalPoint& p : eval_annulus(spec, 0.05, {}, rng)) {
    const DimensionEstimate d = dimension_estimate_full(log_bundle(o.bundle(p.w)));
    EXPECT_EQ(d.d_hat, 2);
  }
}

TEST(Umbilical, ZeroGradientGivesZero) {
  const ManifoldSpec s = ManifoldSpec::sphere();
  const TangentFrame f = tangent_frame(s, vec({0, 0, 1}));
  const SffTensor t = sff_umbilical(synthetic(Vec::Zero(3), -Mat::Identity(3, 3)), 2, f);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_EQ(t.at(i, j).norm(), 0.0);
}

TEST(Umbilical, SphereNorthPoleFromOracle) {
  const ManifoldSpec s = ManifoldSpec::sphere();
  const Vec x = vec({0, 0, 1});
  const TangentFrame f = tangent_frame(s, x);
  std::vector<double> err;
  for (double sigma : {0.1, 0.05}) {
    const SffTensor t = sff_umbilical(log_bundle(oracle_bundle(s, x, sigma)), 2, f);
    EXPECT_LT(t.at(0, 1).norm(), 1e-10);
    err.push_back((t.at(0, 0) - vec({0, 0, -1})).norm());
  }
  EXPECT_LT(err[0], 0.05);
  EXPECT_LE(err[1], err[0] + 1e-12);
}

TEST(Hypersurface, PlugInArithmetic) {
  const double kappa = 0.7;
  const Vec g = vec({0, 0, 1});
  Mat pt = Mat::Identity(3, 3);
  pt(2, 2) = 0;
  Mat basis(3, 2);
  basis << 1, 0, 0, 1, 0, 0;
  const TangentFrame f(Vec::Zero(3), basis);
  const SffTensor t = sff_hypersurface(synthetic(g, -kappa * pt), f, 1e-3);
  const Vec u = vec({0.6, 0.8, 0});
  EXPECT_LT((t.apply(u, u) - kappa * g).norm(), 1e-14);
  EXPECT_LT(t.at(0, 1).norm(), 1e-14);
}

TEST(Hypersurface, GradientTooSmall) {
  const double c0 = 0.2;
  Mat basis(3, 2);
  basis << 1, 0, 0, 1, 0, 0;
  const TangentFrame f(Vec::Zero(3), basis);
  try {
    sff_hypersurface(synthetic(vec({0, 0, c0 / 2}), -Mat::Identity(3, 3)), f, c0);
    FAIL() << "expected GradientTooSmall";
  } catch (const GeomError& e) {
    EXPECT_EQ(e.code(), ErrorCode::GradientTooSmall);
  }
}

TEST(Hypersurface, DefaultThreshold) {
  EXPECT_NEAR(default_c0(ManifoldSpec::sphere()), 0.5, 1e-9);
  // The inner equator of the torus has zero mean curvature.
  EXPECT_EQ(default_c0(ManifoldSpec::torus()), kBlindGradientThreshold);
}

TEST(ProjectorDerivative, MatchesFiniteDifferencedProjector) {
  Rng rng(6);
  for (int dim : {3, 4, 5}) {
    const int d = 2;
    const Mat h = random_symmetric(dim, rng), k = random_symmetric(dim, rng);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Vec ev = es.eigenvalues().reverse();
    const Mat evecs = es.eigenvectors().rowwise().reverse();
    const Mat x = projector_derivative(evecs, ev, k, d);
    const double step = 1e-6;
    const Mat fd = (top_projector(h + step * k, d) - top_projector(h - step * k, d)) / (2 * step);
    EXPECT_LT((x - fd).norm(), 1e-5 * std::max(1.0, x.norm()));
    EXPECT_LT((x - kronecker_projector_derivative(h, k, d)).norm(), 1e-9 * std::max(1.0, x.norm()));
  }
}

TEST(General, EigengapCollapse) {
  LogDerivBundle ld = synthetic(vec({1, 0, 0}), -Mat::Identity(3, 3));
  Mat basis(3, 2);
  basis << 1, 0, 0, 1, 0, 0;
  try {
    sff_general(ld, 2, TangentFrame(Vec::Zero(3), basis));
    FAIL() << "expected EigengapCollapse";
  } catch (const GeomError& e) {
    EXPECT_EQ(e.code(), ErrorCode::EigengapCollapse);
  }
}

TEST(General, UsesThirdDerivativeAlongFrame) {
  // Oracle bundles on Clifford annulus points: the output is symmetric and
  // almost normal to the true tangent space.
  const ManifoldSpec spec = ManifoldSpec::clifford();
  const double s = 0.025;
  Rng rng(7);
  const PopulationOracle o(spec, s);
  for (const EvalPoint& p : eval_annulus(spec, s, {0.5, 2.0, 10}, rng)) {
    const SffTensor t = sff_general(log_bundle(o.bundle(p.w)), 2, p.frame);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        EXPECT_EQ(t.at(i, j), t.at(j, i));
        const Vec tan = p.frame.basis().transpose() * t.at(i, j);
        EXPECT_LE(tan.norm(), 0.05 * std::max(t.at(i, j).norm(), 1e-3));
      }
  }
}

TEST(General, AgreesWithHypersurfaceOnTorus) {
  const ManifoldSpec spec = ManifoldSpec::torus();
  const double s = 0.025;
  Rng rng(8);
  const PopulationOracle o(spec, s);
  std::vector<double> rel;
  for (const EvalPoint& p : eval_annulus(spec, s, {}, rng)) {
    const LogDerivBundle ld = log_bundle(o.bundle(p.w));
    const Vec hg = mean_curvature_from_sff(sff_general(ld, 2, p.frame));
    const Vec hh = mean_curvature_from_sff(sff_hypersurface(ld, p.frame, default_c0(spec)));
    rel.push_back((hg - hh).norm() / std::max(hh.norm(), 1e-12));
  }
  EXPECT_LE(test::median(rel), 0.10);
}

TEST(General, RotationEquivariance) {
  const ManifoldSpec spec = ManifoldSpec::clifford();
  Rng rng(9);
  const PopulationOracle o(spec, 0.05);
  const EvalPoint p = eval_annulus(spec, 0.05, {0.5, 2.0, 1}, rng)[0];
  const LogDerivBundle ld = log_bundle(o.bundle(p.w));
  const Mat q = test::random_rotation(4, rng);
  LogDerivBundle lq = ld;
  lq.g = q * ld.g;
  lq.h = q * ld.h * q.transpose();
  lq.t = rotate(ld.t, q);
  lq.point = q * ld.point;
  const TangentFrame fq(q * p.frame.base_point(), q * p.frame.basis());
  const SffTensor a = sff_general(ld, 2, p.frame), b = sff_general(lq, 2, fq);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_LT((q * a.at(i, j) - b.at(i, j)).norm(), 1e-8 * std::max(1.0, a.at(i, j).norm()));
}

TEST(MeanCurvature, FromTensor) {
  const ManifoldSpec s = ManifoldSpec::sphere();
  const Vec x = vec({0, 0.6, 0.8});
  SffTensor t(tangent_frame(s, x));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.set(i, j, i == j ? Vec(-x) : Vec(Vec::Zero(3)));
  EXPECT_LT((mean_curvature_from_sff(t) + x).norm(), 1e-14);
  EXPECT_EQ(mean_curvature_from_sff(SffTensor(tangent_frame(s, x))).norm(), 0.0);

  const ManifoldSpec c = ManifoldSpec::clifford();
  Rng rng(10);
  const Vec y = sample_uniform(c, 1, rng)[0];
  EXPECT_LT((mean_curvature_from_sff(sff_true(c, y)) - mean_curvature_true(c, y)).norm(), 1e-12);
  EXPECT_LT((mean_curvature_true(c, y) + 0.5 * y).norm(), 1e-12);
}

TEST(OperatorError, SelfAndZero) {
  const ManifoldSpec s = ManifoldSpec::sphere();
  const Vec x = vec({0, 0, 1});
  const SffTensor a = sff_true(s, x);
  Rng rng(11);
  EXPECT_EQ(sff_operator_error(a, a, rng, 100), 0.0);
  EXPECT_NEAR(sff_operator_error(a, SffTensor(a.frame()), rng, 1000), 1.0, 1e-12);
}
