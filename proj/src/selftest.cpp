#include "geom/harness.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace geom {

namespace {

struct Check {
  const char* name;
  std::function<std::string()> run;  // empty string on success
};

std::string fail_if(bool bad, const std::string& detail) { return bad ? detail : std::string(); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Largest relative deviation of the bundle's derivative tensors from
/// central differences of the lower orders, as (order1, order2, order3).
std::array<double, 3> fd_errors(const std::function<DerivativeBundle(const Vec&)>& f, const Vec& y, double step) {
  const DerivativeBundle b = f(y);
  const auto dim = static_cast<std::size_t>(y.size());
  std::array<double, 3> err{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < dim; ++k) {
    Vec e = Vec::Zero(y.size());
    e[static_cast<Eigen::Index>(k)] = step;
    const DerivativeBundle bp = f(y + e), bm = f(y - e);
    const auto kk = static_cast<Eigen::Index>(k);
    err[0] = std::max(err[0], std::abs((bp.p - bm.p) / (2 * step) - b.g1[kk]) / b.g1.norm());
    err[1] = std::max(err[1], ((bp.g1 - bm.g1) / (2 * step) - b.g2.col(kk)).norm() / b.g2.norm());
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        const double fd = (bp.g2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                           bm.g2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) /
                          (2 * step);
        err[2] = std::max(err[2], std::abs(fd - b.g3(k, i, j)) / b.g3.max_abs());
      }
  }
  return err;
}

std::vector<Check> checks() {
  return {
      {"embed parameterizations",
       [] {
         const Vec t = embed(ManifoldSpec::torus(), {0.0, 0.0});
         const Vec c = embed(ManifoldSpec::clifford(), {0.0, std::numbers::pi / 2});
         return fail_if((t - Vec::Unit(3, 0) * 3).norm() > 1e-12 || std::abs(c[0] - 1) + std::abs(c[3] - 1) > 1e-12,
                        "unexpected embedding");
       }},
      {"projection idempotent",
       [] {
         Rng rng(3);
         double worst = 0;
         for (const ManifoldSpec& s : {ManifoldSpec::torus(), ManifoldSpec::clifford(), ManifoldSpec::sphere()}) {
           for (const Vec& x : sample_uniform(s, 50, rng)) {
             Vec y = x;
             for (Eigen::Index k = 0; k < y.size(); ++k) y[k] += 0.1 * rng.normal();
             const Vec p = project(s, y);
             worst = std::max(worst, (project(s, p) - p).norm());
           }
         }
         return fail_if(worst > 1e-12, "max |pi(pi(y)) - pi(y)| = " + num(worst));
       }},
      {"second fundamental form vs finite differences",
       [] {
         Rng rng(5);
         double worst = 0;
         for (const ManifoldSpec& s : {ManifoldSpec::torus(), ManifoldSpec::clifford(), ManifoldSpec::sphere()})
           for (const Vec& x : sample_uniform(s, 10, rng)) {
             const SffTensor a = sff_true(s, x), b = sff_fd_oracle(s, x, default_fd_step(s));
             for (int i = 0; i < a.dim(); ++i)
               for (int j = 0; j < a.dim(); ++j) worst = std::max(worst, (a.at(i, j) - b.at(i, j)).norm());
           }
         return fail_if(worst > 1e-5, "max deviation " + num(worst));
       }},
      {"oracle derivative tensors vs finite differences",
       [] {
         const ManifoldSpec s = ManifoldSpec::torus();
         const PopulationOracle o(s, 0.1);
         Vec y(3);
         y << 2.95, 0.4, 0.15;
         const auto e = fd_errors([&](const Vec& q) { return o.bundle(q); }, y, 1e-4);
         return fail_if(e[0] > 1e-6 || e[1] > 1e-6 || e[2] > 1e-5, "rel errors " + num(e[0]) + " " + num(e[1]) + " " + num(e[2]));
       }},
      {"kde derivative tensors vs finite differences",
       [] {
         Rng rng(9);
         const SampleSet smp = add_noise(sample_uniform(ManifoldSpec::circle(), 500, rng), 0.1, rng);
         const KernelEstimator kde(smp.points);
         const BandwidthPlan plan = BandwidthPlan::shared(0.3);
         Vec y(2);
         y << 0.8, 0.3;
         const auto e = fd_errors([&](const Vec& q) { return kde.bundle(q, plan); }, y, 1e-4);
         return fail_if(e[0] > 1e-6 || e[1] > 1e-6 || e[2] > 1e-5, "rel errors " + num(e[0]) + " " + num(e[1]) + " " + num(e[2]));
       }},
      {"log-derivatives of a Gaussian",
       [] {
         const KernelEstimator kde({Vec::Zero(3)});
         Vec y(3);
         y << 0.3, -0.2, 0.5;
         const LogDerivBundle ld = log_bundle(kde.bundle(y, BandwidthPlan::shared(0.7)));
         const double s2 = 0.49;
         const double e = (ld.g + y / s2).norm() + (ld.h + Mat::Identity(3, 3) / s2).norm() + ld.t.max_abs();
         return fail_if(e > 1e-10, "deviation " + num(e));
       }},
      {"principal angle metric",
       [] {
         Mat a(2, 1), b(2, 1);
         a << 1, 0;
         b << std::cos(std::numbers::pi / 6), std::sin(std::numbers::pi / 6);
         return fail_if(std::abs(err_tan(a, b) - 0.5) > 1e-12, "sin 30 deg should be 0.5");
       }},
      {"hausdorff arc vs chord",
       [] {
         const ManifoldSpec c = ManifoldSpec::circle();
         const Vec a = embed(c, {0.0}), b = embed(c, {std::numbers::pi / 4});
         const double h = hausdorff(geodesic_arc(c, a, b, 20001), densify({a, b}, 20000));
         return fail_if(std::abs(h - (1 - std::cos(std::numbers::pi / 8))) > 1e-6, "got " + num(h));
       }},
      {"box-plot quantiles",
       [] {
         std::vector<double> v;
         for (int i = 1; i <= 100; ++i) v.push_back(i);
         const BoxStats s = box_stats(v);
         return fail_if(s.median != 50.5 || s.q1 != 25.75 || s.q3 != 75.25 || s.outliers != 0, "type-7 quantiles off");
       }},
      {"records round trip",
       [] {
         std::vector<ExperimentRecord> r(2);
         r[0] = {"level_set", "torus", 0.05, 0, 0, 3, "level_dist", 0.1 + 0.2, ""};
         r[1] = {"level_set", "torus", 0.05, 0, 0, 4, "level_dist", std::nan(""), "NoCrossing"};
         std::stringstream ss;
         write_records_csv(ss, r);
         return fail_if(read_records_csv(ss) != r, "parse(write(records)) differs");
       }},
  };
}

}  // namespace

int selftest(std::ostream& os) {
  int failures = 0;
  for (const Check& c : checks()) {
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = std::string("threw ") + e.what();
    }
    if (detail.empty()) {
      os << "PASS  " << c.name << '\n';
    } else {
      os << "FAIL  " << c.name << ": " << detail << '\n';
      ++failures;
    }
  }
  return failures;
}

}  // namespace geom
