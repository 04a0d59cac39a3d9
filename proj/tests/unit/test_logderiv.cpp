#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace geom;
using geom::test::vec;

TEST(LogBundle, GaussianIsLogQuadratic) {
  const double s = 0.6;
  const KernelEstimator k({Vec::Zero(3)});
  const Vec y = vec({0.2, -0.4, 0.3});
  const LogDerivBundle ld = log_bundle(k.bundle(y, BandwidthPlan::shared(s)));
  EXPECT_LT((ld.g + y / (s * s)).norm(), 1e-12);
  EXPECT_LT((ld.h + Mat::Identity(3, 3) / (s * s)).norm(), 1e-11);
  EXPECT_LT(ld.t.max_abs(), 1e-9);
  EXPECT_EQ(ld.point, y);
}

TEST(LogBundle, ScalarThirdDerivativeIdentity) {
  // (log p)''' = p'''/p - 3 p'' p' / p^2 + 2 (p'/p)^3 on a 1-D mixture.
  const KernelEstimator k({vec({-1.0}), vec({0.3}), vec({1.2}), vec({2.0})});
  for (double y : {-0.7, 0.1, 0.9, 1.7}) {
    const DerivativeBundle b = k.bundle(vec({y}), BandwidthPlan::shared(0.5));
    const double p = b.p, p1 = b.g1[0], p2 = b.g2(0, 0), p3 = b.g3(0, 0, 0);
    const double want = p3 / p - 3 * p2 * p1 / (p * p) + 2 * std::pow(p1 / p, 3);
    const LogDerivBundle ld = log_bundle(b);
    EXPECT_NEAR(ld.t(0, 0, 0), want, 1e-10 * std::max(1.0, std::abs(want)));
    EXPECT_NEAR(ld.h(0, 0), p2 / p - (p1 / p) * (p1 / p), 1e-12);
  }
}

TEST(LogBundle, FiniteDifferencesOfLogDensity) {
  Rng rng(9);
  std::vector<Vec> pts;
  for (int i = 0; i < 30; ++i) pts.push_back(vec({rng.normal(), rng.normal()}));
  const KernelEstimator k(pts);
  const BandwidthPlan plan = BandwidthPlan::shared(0.6);
  auto ld_at = [&](const Vec& y) { return log_bundle(k.bundle(y, plan)); };
  const double step = 1e-4;
  for (int t = 0; t < 5; ++t) {
    const Vec y = vec({rng.normal(), rng.normal()});
    const LogDerivBundle c = ld_at(y);
    double e1 = 0, e2 = 0, e3 = 0;
    for (Eigen::Index j = 0; j < 2; ++j) {
      Vec dy = Vec::Zero(2);
      dy[j] = step;
      const double fd1 = (std::log(k.density(y + dy, 0.6)) - std::log(k.density(y - dy, 0.6))) / (2 * step);
      e1 = std::max(e1, std::abs(fd1 - c.g[j]) / c.g.norm());
      const LogDerivBundle p = ld_at(y + dy), m = ld_at(y - dy);
      e2 = std::max(e2, ((p.g - m.g) / (2 * step) - c.h.col(j)).norm() / c.h.norm());
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) {
          const auto ai = static_cast<Eigen::Index>(a), bi = static_cast<Eigen::Index>(b);
          const double fd3 = (p.h(ai, bi) - m.h(ai, bi)) / (2 * step);
          e3 = std::max(e3, std::abs(fd3 - c.t(static_cast<std::size_t>(j), a, b)) / c.t.max_abs());
        }
    }
    EXPECT_LE(e1, 1e-6);
    EXPECT_LE(e2, 1e-6);
    EXPECT_LE(e3, 1e-5);
  }
}

TEST(LogBundle, OutputsAreSymmetric) {
  const PopulationOracle o(ManifoldSpec::torus(), 0.1);
  const LogDerivBundle ld = log_bundle(o.bundle(vec({2.9, 0.5, 0.2})));
  EXPECT_EQ(ld.h, ld.h.transpose());
  EXPECT_LE(ld.t.asymmetry(), 1e-14 * ld.t.max_abs());
}

TEST(LogBundle, DensityUnderflow) {
  DerivativeBundle b;
  b.p = 1e-320;
  b.g1 = Vec::Zero(2);
  b.g2 = Mat::Zero(2, 2);
  b.g3 = Tensor3(2);
  try {
    log_bundle(b);
    FAIL() << "expected DensityUnderflow";
  } catch (const GeomError& e) {
    EXPECT_EQ(e.code(), ErrorCode::DensityUnderflow);
  }
  b.p = 1e-5;
  EXPECT_THROW(log_bundle(b, 1e-4), GeomError);
  EXPECT_NO_THROW(log_bundle(b, 1e-6));
}

TEST(LogBundle, RelativeFloor) {
  const ManifoldSpec t = ManifoldSpec::torus(2, 1);
  const double s = 0.05;
  const double peak = std::pow(2 * std::numbers::pi * s * s, -0.5) / t.volume();
  EXPECT_NEAR(density_peak_proxy(t, s), peak, 1e-12 * peak);
  EXPECT_NEAR(relative_floor(t, s), 1e-8 * peak, 1e-20);
  // The oracle density on M sits close to the proxy.
  const double on_m = PopulationOracle(t, s).density(vec({3, 0, 0}));
  EXPECT_NEAR(on_m / peak, 1.0, 0.1);
}

TEST(HessianTheorem, NormalBlockEigenvalues) {
  // sigma^2 H restricted to the normal block sits near -1.
  for (const ManifoldSpec& spec : {ManifoldSpec::torus(), ManifoldSpec::clifford()}) {
    const double s = 0.025;
    Rng rng(10);
    const PopulationOracle o(spec, s);
    for (const EvalPoint& p : eval_annulus(spec, s, {}, rng)) {
      const LogDerivBundle ld = log_bundle(o.bundle(p.w));
      const Mat nb = p.frame.normal_basis();
      const Mat block = s * s * nb.transpose() * ld.h * nb;
      Eigen::SelfAdjointEigenSolver<Mat> es(block);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) EXPECT_NEAR(es.eigenvalues()[i], -1.0, 0.1);
    }
  }
}
