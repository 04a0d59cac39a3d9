#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace geom;
using geom::test::vec;

namespace {

constexpr double kPi = std::numbers::pi;

ScoreField oracle_field(const PopulationOracle& o) {
  return [&o](const Vec& y, bool need_hessian) {
    const LogDerivBundle ld = log_bundle(o.bundle(y));
    return ScoreSample{ld.g, need_hessian ? ld.h : Mat()};
  };
}

double max_distance_to_circle(const std::vector<Vec>& path) {
  double worst = 0;
  for (const Vec& p : path) worst = std::max(worst, std::abs(p.norm() - 1.0));
  return worst;
}

std::vector<Vec> segment(const Vec& a, const Vec& b, std::size_t n) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(a + (static_cast<double>(i) / static_cast<double>(n - 1)) * (b - a));
  return out;
}

}  // namespace

TEST(DegenerateLength, OrthogonalPathIsFree) {
  const GradientField g = [](const Vec&) { return vec({0, 1}); };
  EXPECT_EQ(degenerate_length(segment(vec({0, 0}), vec({5, 0}), 20), g), 0.0);
}

TEST(DegenerateLength, SingleSegmentConstantField) {
  const Vec g0 = vec({0.3, -2.0, 1.0});
  const GradientField g = [&](const Vec&) { return g0; };
  const Vec a = vec({1, 2, 3}), b = vec({0.5, 2.5, 2});
  EXPECT_NEAR(degenerate_length({a, b}, g), std::abs((b - a).dot(g0)), 1e-14);
}

TEST(DegenerateLength, RadialPathTowardGaussianPeak) {
  // |d log P| integrates to the log-density difference along a monotone ray.
  const double s = 0.4;
  const GradientField g = [&](const Vec& y) { return Vec(-y / (s * s)); };
  const Vec dir = vec({0.6, 0.8});
  const double r1 = 2.0, r2 = 0.3;
  const auto path = segment(r1 * dir, r2 * dir, 200);
  const double expected = (r1 * r1 - r2 * r2) / (2 * s * s);
  EXPECT_NEAR(degenerate_length(path, g), expected, 1e-10 * expected);
}

TEST(DegenerateLength, RefinementInvariance) {
  const PopulationOracle o(ManifoldSpec::circle(), 0.1);
  const GradientField g = [&](const Vec& y) { return log_bundle(o.bundle(y)).g; };
  const auto arc = geodesic_arc(ManifoldSpec::circle(), vec({1, 0}), vec({0, 1}), 11);
  std::vector<Vec> bent;
  for (std::size_t i = 0; i < arc.size(); ++i) bent.push_back((1.0 + 0.1 * std::sin(kPi * static_cast<double>(i) / 10)) * arc[i]);
  // Once segments resolve the field, halving them shrinks the change about fourfold.
  const double l1 = degenerate_length(densify(bent, 16), g), l2 = degenerate_length(densify(bent, 32), g),
               l3 = degenerate_length(densify(bent, 64), g);
  EXPECT_LT(std::abs(l3 - l2), 0.5 * std::abs(l2 - l1));
  EXPECT_LT(std::abs(l3 - l2), 1e-4 * l3);
}

TEST(OptimizeGeodesic, EqualEndpointsGiveConstantPath) {
  const PopulationOracle o(ManifoldSpec::circle(), 0.1);
  const Vec a = vec({1, 0});
  const GeodesicPath p = optimize_geodesic(a, a, 20, oracle_field(o));
  ASSERT_EQ(p.points.size(), 22u);
  for (const Vec& x : p.points) EXPECT_EQ(x, a);
  EXPECT_EQ(p.objective_history.back(), 0.0);
}

TEST(OptimizeGeodesic, MonotoneAndPinned) {
  const double s = 0.1;
  const PopulationOracle o(ManifoldSpec::circle(), s);
  const Vec a = vec({1, 0}), b = vec({0, 1});
  GeodesicOptions opt;
  opt.sigma = s;
  opt.steps = 200;
  const GeodesicPath p = optimize_geodesic(a, b, 30, oracle_field(o), opt);
  EXPECT_EQ(p.points.front(), a);
  EXPECT_EQ(p.points.back(), b);
  EXPECT_EQ(p.fixed_endpoints.first, a);
  EXPECT_EQ(p.fixed_endpoints.second, b);
  ASSERT_GE(p.objective_history.size(), 2u);
  for (std::size_t i = 1; i < p.objective_history.size(); ++i)
    EXPECT_LT(p.objective_history[i], p.objective_history[i - 1]);
  EXPECT_DOUBLE_EQ(p.softening, 1e-3);
}

TEST(OptimizeGeodesic, OracleQuarterArcRate) {
  const ManifoldSpec c = ManifoldSpec::circle();
  const Vec a = vec({1, 0}), b = vec({0, 1});
  const auto arc = geodesic_arc(c, a, b, 101 * 16 + 1);
  std::vector<double> h;
  for (double s : {0.1, 0.05}) {
    const PopulationOracle o(c, s);
    GeodesicOptions opt;
    opt.sigma = s;
    opt.steps = 300;
    const GeodesicPath p = optimize_geodesic(a, b, 100, oracle_field(o), opt);
    h.push_back(hausdorff(densify(p.points, 16), arc));
  }
  EXPECT_LE(h[0], 0.1);
  EXPECT_LE(h[1] / h[0], 0.8);
}

TEST(OptimizeGeodesic, ShortcutKdeFieldStaysNearManifold) {
  const ManifoldSpec c = ManifoldSpec::circle();
  const double s = 0.05;
  Rng rng(5);
  SampleSet smp = add_noise(sample_uniform(c, 3000, rng), s, rng);
  const Vec a = embed(c, {0.2}), b = embed(c, {0.2 + kPi / 2});
  const SampleSet aug = shortcut_inject(smp, a, b, rng);
  const double h1 = bandwidth(scott_constant(aug, 1), 1, static_cast<double>(aug.size()), 2);
  const KernelEstimator k(aug.points);
  const ScoreField f = [&](const Vec& y, bool need_hessian) {
    const LogDerivBundle ld = log_bundle(k.bundle(y, BandwidthPlan::shared(h1), 2));
    return ScoreSample{ld.g, need_hessian ? ld.h : Mat()};
  };
  GeodesicOptions opt;
  opt.sigma = s;
  opt.steps = 300;
  const GeodesicPath p = optimize_geodesic(a, b, 100, f, opt);
  EXPECT_LT(max_distance_to_circle(p.points), max_distance_to_circle(segment(a, b, 102)));
}

TEST(OptimizeGeodesic, NonFiniteField) {
  const ScoreField bad = [](const Vec& y, bool) { return ScoreSample{Vec::Constant(y.size(), std::nan("")), Mat()}; };
  try {
    optimize_geodesic(vec({1, 0}), vec({0, 1}), 10, bad);
    FAIL() << "expected NonFiniteObjective";
  } catch (const GeomError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteObjective);
  }
}

TEST(Christoffel, DegenerateExample) {
  const double kappa = 0.8;
  LogDerivBundle ld;
  ld.g = vec({0, 0, 1});
  ld.h = -kappa * (Mat::Identity(3, 3) - ld.g * ld.g.transpose());
  ld.t = Tensor3(3);
  ld.point = Vec::Zero(3);
  const Tensor3 c = christoffel_degenerate(ld);
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double want = (m == 2 && i == j && i < 2) ? -kappa : 0.0;
        EXPECT_NEAR(c(m, i, j), want, 1e-15);
      }
  ld.g = Vec::Zero(3);
  try {
    christoffel_degenerate(ld);
    FAIL() << "expected GradientTooSmall";
  } catch (const GeomError& e) {
    EXPECT_EQ(e.code(), ErrorCode::GradientTooSmall);
  }
}

TEST(Christoffel, ConformalWithZeroGradient) {
  LogDerivBundle ld;
  ld.g = Vec::Zero(3);
  ld.h = Mat::Identity(3, 3);
  ld.t = Tensor3(3);
  ld.point = Vec::Zero(3);
  EXPECT_EQ(christoffel_conformal(ld, 2).max_abs(), 0.0);
}

TEST(Christoffel, ConformalFormula) {
  LogDerivBundle ld;
  ld.g = vec({0.2, -0.4, 1.0});
  ld.h = Mat::Zero(3, 3);
  ld.t = Tensor3(3);
  ld.point = Vec::Zero(3);
  const Tensor3 c = christoffel_conformal(ld, 2);
  const Vec df = ld.g;  // 2 / d = 1
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j), kk = static_cast<Eigen::Index>(k);
        const double want = (i == k) * df[jj] + (j == k) * df[ii] - (i == j) * df[kk];
        EXPECT_NEAR(c(k, i, j), want, 1e-15);
      }
}

TEST(Residual, StraightLineWithoutConnection) {
  std::vector<CurveJet> line;
  for (int i = 0; i < 10; ++i) line.push_back({vec({0.1 * i, 1.0}), vec({1, 0}), vec({0, 0})});
  EXPECT_EQ(acceleration_residual(line, [](const Vec&) { return Tensor3(2); }), 0.0);
}

TEST(Residual, CircleGeodesicUnderOracleConnection) {
  const ManifoldSpec c = ManifoldSpec::circle();
  const auto jets = geodesic_jet(c, vec({1, 0}), embed(c, {2.0}), 33);
  const PopulationOracle o(c, 0.05);
  const double r = acceleration_residual(jets, [&](const Vec& y) { return christoffel_degenerate(log_bundle(o.bundle(y))); });
  // The bare acceleration has unit norm on the unit circle.
  EXPECT_LT(r, 0.05);
}

TEST(Hausdorff, Examples) {
  const auto a = segment(vec({0, 0}), vec({1, 0}), 11);
  EXPECT_EQ(hausdorff(a, a), 0.0);
  const auto b = segment(vec({0, 0.25}), vec({1, 0.25}), 11);
  EXPECT_NEAR(hausdorff(a, b), 0.25, 1e-15);
  EXPECT_EQ(hausdorff(a, b), hausdorff(b, a));
  const auto c = segment(vec({0, 0}), vec({2, 0}), 3);
  EXPECT_NEAR(hausdorff(a, c), 1.0, 1e-15);
  EXPECT_NEAR(hausdorff(c, a), 1.0, 1e-15);
}

TEST(Hausdorff, ArcAgainstChord) {
  // An arc of angle theta bulges 1 - cos(theta / 2) past its chord.
  const ManifoldSpec c = ManifoldSpec::circle();
  for (double theta : {kPi / 4, kPi / 2}) {
    const Vec a = embed(c, {0.0}), b = embed(c, {theta});
    const double h = hausdorff(geodesic_arc(c, a, b, 20001), densify({a, b}, 20000));
    EXPECT_NEAR(h, 1 - std::cos(theta / 2), 1e-6);
  }
  EXPECT_NEAR(1 - std::cos(kPi / 8), 0.07612, 1e-5);
}

TEST(PathCsv, Format) {
  GeodesicPath p;
  p.points = {vec({1, 0}), vec({0.5, 0.25}), vec({0, 1})};
  std::stringstream ss;
  write_path_csv(ss, p, "3-7", "abc");
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "# endpoints=3-7 config=abc");
  std::getline(ss, line);
  EXPECT_EQ(line, "x1,x2");
  std::getline(ss, line);
  EXPECT_EQ(line, "1,0");
  std::getline(ss, line);
  EXPECT_EQ(line, "0.5,0.25");
}
