#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace geom;
using geom::test::vec;

namespace {

std::vector<ManifoldSpec> rate_specs() { return {ManifoldSpec::torus(), ManifoldSpec::sphere(), ManifoldSpec::clifford()}; }

}  // namespace

TEST(Oracle, CircleCenterHasZeroGradient) {
  for (double s : {0.1, 0.5, 1.0}) {
    const DerivativeBundle b = oracle_bundle(ManifoldSpec::circle(1), Vec::Zero(2), s);
    EXPECT_LT(b.g1.norm(), 1e-14 * std::max(1.0, b.p / s));
  }
}

TEST(Oracle, TensorSymmetry) {
  const PopulationOracle o(ManifoldSpec::clifford(), 0.05);
  const DerivativeBundle b = o.bundle(vec({0.96, 0.1, 0.2, 0.97}));
  EXPECT_GT(b.p, 0.0);
  EXPECT_LE((b.g2 - b.g2.transpose()).norm(), 1e-12 * b.g2.norm());
  EXPECT_LE(b.g3.asymmetry(), 1e-12 * b.g3.max_abs());
}

TEST(Oracle, FiniteDifferenceConsistency) {
  const double sigma = 0.05;
  Rng rng(12);
  for (const ManifoldSpec& spec : rate_specs()) {
    const PopulationOracle o(spec, sigma);
    const auto pts = eval_annulus(spec, sigma, {0.5, 2.0, 3}, rng);
    for (const EvalPoint& p : pts) {
      const auto e = test::fd_bundle_errors([&](const Vec& y) { return o.bundle(y); }, p.w, 2e-5);
      EXPECT_LE(e.e1, 1e-6) << spec.kind_name();
      EXPECT_LE(e.e2, 1e-6) << spec.kind_name();
      EXPECT_LE(e.e3, 1e-5) << spec.kind_name();
    }
  }
}

TEST(Oracle, QuadratureSelfConvergence) {
  for (const ManifoldSpec& spec : rate_specs()) {
    Rng rng(13);
    const Vec y = eval_annulus(spec, 0.05, {0.5, 2.0, 1}, rng)[0].w;
    const double a = oracle_bundle(spec, y, 0.05, 256).p, b = oracle_bundle(spec, y, 0.05, 512).p;
    EXPECT_LE(std::abs(a - b), 1e-10 * b) << spec.kind_name();
  }
}

TEST(Oracle, SelfCheckFlagsCoarseGrid) {
  OracleOptions opts;
  opts.grid_res = 64;
  opts.self_check = true;
  const PopulationOracle o(ManifoldSpec::torus(), 0.02, opts);
  try {
    o.bundle(vec({3.0, 0.0, 0.0}));
    FAIL() << "expected QuadratureUnderResolved";
  } catch (const GeomError& e) {
    EXPECT_EQ(e.code(), ErrorCode::QuadratureUnderResolved);
  }
}

TEST(Oracle, Preconditions) {
  EXPECT_THROW(PopulationOracle(ManifoldSpec::torus(), 0.0), GeomError);
  OracleOptions opts;
  opts.grid_res = 32;
  EXPECT_THROW(PopulationOracle(ManifoldSpec::torus(), 0.05, opts), GeomError);
}

TEST(Oracle, DensityExpansionOnManifold) {
  // sigma^{D-d} (2 pi)^{(D-d)/2} V_M P(x) -> 1 at points of M (v = 0, A = I).
  Rng rng(14);
  for (const ManifoldSpec& spec : {ManifoldSpec::torus(), ManifoldSpec::clifford()}) {
    const auto xs = sample_uniform(spec, 5, rng);
    const int k = spec.codim();
    std::vector<double> dev;
    for (double s : {0.1, 0.05, 0.025}) {
      const PopulationOracle o(spec, s);
      double worst = 0;
      for (const Vec& x : xs) {
        const double scaled = std::pow(s, k) * std::pow(2 * std::numbers::pi, 0.5 * k) * spec.volume() * o.density(x);
        worst = std::max(worst, std::abs(scaled - 1));
      }
      dev.push_back(worst);
    }
    for (int i = 0; i < 2; ++i) {
      const double ratio = dev[static_cast<std::size_t>(i + 1)] / dev[static_cast<std::size_t>(i)];
      EXPECT_GE(ratio, 0.15) << spec.kind_name();
      EXPECT_LE(ratio, 0.6) << spec.kind_name();
    }
  }
}

TEST(Oracle, SphereLeadingTermIsExact) {
  // On the unit sphere P is proportional to sinh(rho / s^2) / rho, so the
  // leading term is exact up to exp(-2 / s^2).
  const ManifoldSpec spec = ManifoldSpec::sphere();
  for (double s : {0.1, 0.05, 0.025}) {
    const double scaled = s * std::sqrt(2 * std::numbers::pi) * spec.volume() * PopulationOracle(spec, s).density(vec({0.6, 0, 0.8}));
    EXPECT_NEAR(scaled, 1.0, 1e-12);
  }
}

TEST(Oracle, GradientApproachesHalfMeanCurvature) {
  // The scaled deviation shrinks at least linearly in sigma at the outer
  // equator of the torus; the acceptance suite reports the exact order.
  const ManifoldSpec spec = ManifoldSpec::torus(2, 1);
  const Vec x = vec({3, 0, 0});
  const Vec target = mean_curvature_true(spec, x);  // d / 2 = 1
  std::vector<double> err;
  for (double s : {0.1, 0.05, 0.025}) {
    const LogDerivBundle ld = log_bundle(oracle_bundle(spec, x, s));
    err.push_back((ld.g - target).norm());
  }
  EXPECT_LT(err[0], 0.1);
  EXPECT_LE(err[1] / err[0], 0.8);
  EXPECT_LE(err[2] / err[1], 0.8);
}

TEST(Oracle, HessianSpectralGap) {
  // Gap between the tangent and normal eigenvalue blocks, in units of
  // sigma^-2; frozen from a calibration run (observed about 1).
  for (const ManifoldSpec& spec : {ManifoldSpec::torus(), ManifoldSpec::clifford()}) {
    for (double s : {0.1, 0.05}) {
      Rng rng(15);
      const PopulationOracle o(spec, s);
      for (const EvalPoint& p : eval_annulus(spec, s, {0.5, 2.0, 10}, rng)) {
        const TangentEstimate t = tangent_estimate(log_bundle(o.bundle(p.w)), spec.intrinsic_dim());
        const int d = spec.intrinsic_dim();
        EXPECT_GE((t.eigenvalues[d - 1] - t.eigenvalues[d]) * s * s, 0.5);
      }
    }
  }
}

TEST(LevelSet, SphereScalesQuadratically) {
  const ManifoldSpec spec = ManifoldSpec::sphere(1);
  const Vec x = vec({0, 0, 1});
  std::vector<double> t;
  for (double s : {0.1, 0.05, 0.025}) t.push_back(level_set_probe(spec, s, x, -x));
  for (int i = 0; i < 2; ++i) {
    EXPECT_GT(t[static_cast<std::size_t>(i)], 0.0);
    const double ratio = t[static_cast<std::size_t>(i + 1)] / t[static_cast<std::size_t>(i)];
    EXPECT_GE(ratio, 0.15);
    EXPECT_LE(ratio, 0.5);
  }
}

TEST(LevelSet, ZeroSigmaAndBadDirections) {
  const ManifoldSpec spec = ManifoldSpec::sphere(1);
  const Vec x = vec({0, 0, 1});
  EXPECT_EQ(level_set_probe(spec, 0.0, x, x), 0.0);
  EXPECT_THROW(level_set_probe(spec, 0.05, x, vec({1, 0, 0})), GeomError);
  EXPECT_THROW(level_set_probe(spec, 0.05, x, vec({0, 0, 2})), GeomError);
}

TEST(LevelSet, OutwardRayHasNoCrossing) {
  // The density falls monotonically away from the sphere's concave side.
  const PopulationOracle o(ManifoldSpec::sphere(1), 0.05);
  const Vec x = vec({0, 0, 1});
  try {
    level_set_probe(o, x, x);
    FAIL() << "expected NoCrossing";
  } catch (const GeomError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoCrossing);
  }
  EXPECT_GT(level_set_distance(o, x, {x, -x}), 0.0);
}
