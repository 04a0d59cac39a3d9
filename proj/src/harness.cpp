#include "geom/harness.hpp"

#include "geom/parallel.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>

namespace geom {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags mixed into the RNG keys below the experiment id.
constexpr std::uint64_t kTagAnnulus = 101;
constexpr std::uint64_t kTagPairs = 103;

constexpr std::size_t kDensify = 16;
constexpr std::size_t kResidualTimes = 64;

struct Emitter {
  const ExperimentConfig& cfg;
  double sigma;
  std::size_t n;
  int rep;

  ExperimentRecord make(std::size_t point, const std::string& metric, double value, const std::string& flag) const {
    ExperimentRecord r;
    r.experiment = cfg.name();
    r.manifold = cfg.manifold.kind_name();
    r.sigma = sigma;
    r.n = n;
    r.rep = rep;
    r.point_id = point;
    r.metric = metric;
    r.value = value;
    r.flag = flag;
    return r;
  }
};

/// Evaluates fn() and appends either its value or a flagged failure row.
template <class Fn>
void attempt(std::vector<ExperimentRecord>& out, const Emitter& em, std::size_t point, const std::string& metric,
             Fn&& fn) {
  try {
    const double v = fn();
    if (std::isfinite(v))
      out.push_back(em.make(point, metric, v, ""));
    else
      out.push_back(em.make(point, metric, kNaN, error_code_name(ErrorCode::NonFiniteObjective)));
  } catch (const GeomError& e) {
    out.push_back(em.make(point, metric, kNaN, error_code_name(e.code())));
  }
}

std::vector<std::string> metrics_of(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::TangentSigmaSweep:
    case ExperimentKind::TangentNSweep:
      return {"err_tan"};
    case ExperimentKind::TangentBaseline:
      return {"err_tan", "err_tan_lpca"};
    case ExperimentKind::CurvatureTorus:
    case ExperimentKind::CurvatureClifford:
    case ExperimentKind::UmbilicalSphere:
      return {"err_curv"};
    case ExperimentKind::DimensionCheck:
      return {"d_hat"};
    case ExperimentKind::GeodesicShortcut:
      return {"hausdorff"};
    case ExperimentKind::PopulationRates: {
      std::vector<std::string> m{"grad_err", "err_tan", "d_hat", "err_curv"};
      if (cfg.manifold.kind == ManifoldKind::Circle || cfg.manifold.kind == ManifoldKind::Sphere) m.push_back("residual");
      return m;
    }
    case ExperimentKind::LevelSet:
      return {"level_dist"};
  }
  return {};
}

/// Log-derivative source for one grid cell: the population oracle, or a
/// KDE with the bandwidth of the highest derivative order an estimator uses.
class Source {
 public:
  Source(const ExperimentConfig& cfg, double sigma, const SampleSet* samples) : spec_(cfg.manifold), sigma_(sigma) {
    floor_ = relative_floor(spec_, sigma);
    if (cfg.mode == Mode::Oracle) {
      OracleOptions opts;
      opts.grid_res = cfg.grid_res;
      oracle_ = std::make_unique<PopulationOracle>(spec_, sigma, opts);
    } else {
      scott_ = scott_constant(*samples, spec_.intrinsic_dim());
      plan_ = BandwidthPlan::per_order(scott_, static_cast<double>(samples->size()), spec_.ambient_dim());
      kde_ = std::make_unique<KernelEstimator>(samples->points);
    }
  }

  bool oracle() const { return oracle_ != nullptr; }
  const PopulationOracle& population() const { return *oracle_; }
  double scott() const { return scott_; }

  /// Log-derivatives at y, estimated at bandwidth h_order in sample mode.
  LogDerivBundle at(const Vec& y, int order) const {
    if (oracle_) return log_bundle(oracle_->bundle(y), floor_);
    DerivativeBundle db = kde_->bundle(y, BandwidthPlan::shared(plan_.h[static_cast<std::size_t>(order)]), order);
    db.sigma = sigma_;
    return log_bundle(db, floor_);
  }

 private:
  ManifoldSpec spec_;
  double sigma_;
  double floor_ = 0.0;
  double scott_ = 0.0;
  BandwidthPlan plan_;
  std::unique_ptr<PopulationOracle> oracle_;
  std::unique_ptr<KernelEstimator> kde_;
};

ScoreField score_field(const std::function<DerivativeBundle(const Vec&)>& bundle) {
  return [bundle](const Vec& y, bool) {
    const DerivativeBundle db = bundle(y);
    ScoreSample s;
    if (!(db.p > 0.0)) {
      s.g = Vec::Constant(y.size(), kNaN);
      s.h = Mat::Constant(y.size(), y.size(), kNaN);
      return s;
    }
    s.g = db.g1 / db.p;
    s.h = db.g2 / db.p - s.g * s.g.transpose();
    return s;
  };
}

void point_metrics(const ExperimentConfig& cfg, const Source& src, const EvalPoint& p, std::size_t id,
                   const Emitter& em, std::vector<ExperimentRecord>& out) {
  const ManifoldSpec& spec = cfg.manifold;
  const int d = spec.intrinsic_dim();
  // The true frame isolates each formula's rate in the population runs; the
  // sample runs evaluate on the estimated frame.
  auto frame_for = [&](const LogDerivBundle& ld) {
    return src.oracle() ? p.frame : tangent_estimate(ld, d).frame;
  };

  switch (cfg.kind) {
    case ExperimentKind::TangentSigmaSweep:
    case ExperimentKind::TangentNSweep:
      attempt(out, em, id, "err_tan", [&] { return err_tan(p.frame, tangent_estimate(src.at(p.w, 2), d).frame); });
      break;
    case ExperimentKind::TangentBaseline:
      attempt(out, em, id, "err_tan", [&] { return err_tan(p.frame, tangent_estimate(src.at(p.w, 2), d).frame); });
      break;
    case ExperimentKind::CurvatureTorus:
      attempt(out, em, id, "err_curv", [&] {
        const LogDerivBundle ld = src.at(p.w, 2);
        return err_curv(p.mean_curvature, mean_curvature_from_sff(sff_hypersurface(ld, frame_for(ld), default_c0(spec))));
      });
      break;
    case ExperimentKind::CurvatureClifford:
      attempt(out, em, id, "err_curv", [&] {
        const LogDerivBundle ld = src.at(p.w, 3);
        return err_curv(p.mean_curvature, mean_curvature_from_sff(sff_general(ld, d, frame_for(ld))));
      });
      break;
    case ExperimentKind::UmbilicalSphere:
      attempt(out, em, id, "err_curv", [&] {
        const LogDerivBundle ld = src.at(p.foot, 1);
        const TangentFrame frame = src.oracle() ? p.frame : tangent_estimate(src.at(p.foot, 2), d).frame;
        return err_curv(p.mean_curvature, mean_curvature_from_sff(sff_umbilical(ld, d, frame)));
      });
      break;
    case ExperimentKind::DimensionCheck:
      attempt(out, em, id, "d_hat", [&] { return static_cast<double>(dimension_estimate(src.at(p.w, 2))); });
      break;
    case ExperimentKind::PopulationRates: {
      attempt(out, em, id, "grad_err", [&] {
        return (src.at(p.foot, 1).g - 0.5 * d * p.mean_curvature).norm();
      });
      std::unique_ptr<LogDerivBundle> ld;
      try {
        ld = std::make_unique<LogDerivBundle>(src.at(p.w, 3));
      } catch (const GeomError& e) {
        for (const char* m : {"err_tan", "d_hat", "err_curv"}) out.push_back(em.make(id, m, kNaN, error_code_name(e.code())));
        break;
      }
      attempt(out, em, id, "err_tan", [&] { return err_tan(p.frame, tangent_estimate(*ld, d).frame); });
      attempt(out, em, id, "d_hat", [&] { return static_cast<double>(dimension_estimate(*ld)); });
      attempt(out, em, id, "err_curv", [&] {
        const SffTensor sff = spec.codim() == 1 ? sff_hypersurface(*ld, p.frame, default_c0(spec)) : sff_general(*ld, d, p.frame);
        return err_curv(p.mean_curvature, mean_curvature_from_sff(sff));
      });
      break;
    }
    case ExperimentKind::LevelSet:
      attempt(out, em, id, "level_dist", [&] {
        const Mat nb = p.frame.normal_basis();
        std::vector<Vec> dirs;
        for (Eigen::Index k = 0; k < nb.cols(); ++k) {
          dirs.push_back(nb.col(k));
          dirs.push_back(-nb.col(k));
        }
        return level_set_distance(src.population(), p.foot, dirs);
      });
      break;
    case ExperimentKind::GeodesicShortcut:
      break;
  }
}

void run_lpca(const ExperimentConfig& cfg, const Source& src, const SampleSet& samples,
              const std::vector<EvalPoint>& pts, const Emitter& em, std::vector<std::vector<ExperimentRecord>>& out) {
  const int d = cfg.manifold.intrinsic_dim();
  const LpcaConfig lc{lpca_bandwidth(src.scott(), samples.size(), d), d};
  parallel_for(pts.size(), [&](std::size_t i) {
    attempt(out[i], em, i, "err_tan_lpca", [&] { return err_tan(pts[i].frame, lpca_tangent(samples, pts[i].w, lc).frame); });
  });
}

/// One record per endpoint pair: Hausdorff distance between the optimized
/// density geodesic from w1 to w2 and the true geodesic between their feet.
void run_geodesics(const ExperimentConfig& cfg, double sigma, std::size_t si, std::size_t ni, int rep,
                   const SampleSet* samples, const std::vector<EvalPoint>& pts, const Emitter& em,
                   std::vector<std::vector<ExperimentRecord>>& out) {
  const ManifoldSpec& spec = cfg.manifold;
  const auto exp_id = static_cast<std::uint64_t>(cfg.kind);
  std::unique_ptr<PopulationOracle> oracle;
  if (cfg.mode == Mode::Oracle) {
    OracleOptions opts;
    opts.grid_res = cfg.grid_res;
    oracle = std::make_unique<PopulationOracle>(spec, sigma, opts);
  }
  parallel_for(cfg.geodesic_pairs, [&](std::size_t k) {
    Rng rng = Rng::stream(cfg.seed, {exp_id, kTagPairs, si, ni, static_cast<std::uint64_t>(rep), k});
    const std::size_t i1 = rng.below(pts.size());
    std::size_t i2 = rng.below(pts.size());
    while (pts.size() > 1 && i2 == i1) i2 = rng.below(pts.size());
    const EvalPoint& w1 = pts[i1];
    const EvalPoint& w2 = pts[i2];
    attempt(out[k], em, k, "hausdorff", [&] {
      const std::vector<Vec> arc = geodesic_arc(spec, w1.foot, w2.foot, (cfg.n_interior + 1) * kDensify + 1);
      GeodesicOptions opts;
      opts.sigma = sigma;
      opts.steps = cfg.geodesic_steps;
      opts.tolerance = cfg.geodesic_tolerance;
      GeodesicPath path;
      if (oracle) {
        const PopulationOracle& o = *oracle;
        path = optimize_geodesic(w1.w, w2.w, cfg.n_interior, score_field([&o](const Vec& y) { return o.bundle(y); }), opts);
      } else {
        const SampleSet aug = shortcut_inject(*samples, w1.w, w2.w, rng);
        const double c = scott_constant(aug, spec.intrinsic_dim());
        const double h1 = bandwidth(c, 1, static_cast<double>(aug.size()), spec.ambient_dim());
        const KernelEstimator kde(aug.points);
        const BandwidthPlan plan = BandwidthPlan::shared(h1);
        path = optimize_geodesic(w1.w, w2.w, cfg.n_interior,
                                 score_field([&](const Vec& y) { return kde.bundle(y, plan, 2); }), opts);
      }
      return hausdorff(densify(path.points, kDensify), arc);
    });
  });
}

void run_residual(const ExperimentConfig& cfg, const Source& src, const std::vector<EvalPoint>& pts, const Emitter& em,
                  std::vector<ExperimentRecord>& out) {
  const ManifoldSpec& spec = cfg.manifold;
  if (spec.kind != ManifoldKind::Circle && spec.kind != ManifoldKind::Sphere) return;
  attempt(out, em, 0, "residual", [&]() -> double {
    require(pts.size() >= 2, "residual needs two annulus feet");
    const std::vector<CurveJet> jets = geodesic_jet(spec, pts[0].foot, pts[1].foot, kResidualTimes);
    if (spec.kind == ManifoldKind::Circle)
      return acceleration_residual(jets, [&](const Vec& y) { return christoffel_degenerate(src.at(y, 2)); });
    return acceleration_residual(jets, [&](const Vec& y) { return christoffel_conformal(src.at(y, 1), spec.intrinsic_dim()); });
  });
}

}  // namespace

double err_tan(const Mat& truth, const Mat& estimate) {
  require(truth.rows() == estimate.rows() && truth.cols() == estimate.cols(), "err_tan: frame shapes differ");
  // sin of the largest principal angle is the spectral norm of the part of
  // the estimate outside span(truth); this stays accurate near zero, where
  // sqrt(1 - cos^2) loses half the digits.
  const Mat outside = estimate - truth * (truth.transpose() * estimate);
  Eigen::JacobiSVD<Mat> svd(outside);
  return std::min(1.0, svd.singularValues().maxCoeff());
}

double err_tan(const TangentFrame& truth, const TangentFrame& estimate) { return err_tan(truth.basis(), estimate.basis()); }

double err_curv(const Vec& truth, const Vec& estimate) {
  require(truth.size() == estimate.size(), "err_curv: dimension mismatch");
  return (truth - estimate).norm();
}

SampleSet shortcut_inject(const SampleSet& samples, const Vec& w1, const Vec& w2, Rng& rng) {
  require(samples.size() >= 1, "shortcut_inject: need at least one sample");
  require(w1.size() == w2.size(), "shortcut_inject: endpoint dimensions differ");
  SampleSet out = samples;
  const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(samples.size()))));
  out.points.reserve(samples.size() + m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = m == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(m - 1);
    Vec p = w1 + t * (w2 - w1);
    if (samples.sigma > 0.0)
      for (Eigen::Index k = 0; k < p.size(); ++k) p[k] += samples.sigma * rng.normal();
    out.points.push_back(std::move(p));
  }
  return out;
}

std::vector<Vec> densify(const std::vector<Vec>& path, std::size_t factor) {
  require(factor >= 1, "densify: factor must be positive");
  if (path.size() < 2) return path;
  std::vector<Vec> out;
  out.reserve((path.size() - 1) * factor + 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    for (std::size_t j = 0; j < factor; ++j)
      out.push_back(path[i] + (static_cast<double>(j) / static_cast<double>(factor)) * (path[i + 1] - path[i]));
  out.push_back(path.back());
  return out;
}

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg) {
  const ManifoldSpec& spec = cfg.manifold;
  const auto exp_id = static_cast<std::uint64_t>(cfg.kind);
  const std::vector<std::size_t> ns = cfg.mode == Mode::Sample ? cfg.ns : std::vector<std::size_t>{0};
  const std::vector<std::string> metrics = metrics_of(cfg);
  std::vector<ExperimentRecord> records;

  for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
    const double sigma = cfg.sigmas[si];
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      const std::size_t n = ns[ni];
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        const Emitter em{cfg, sigma, n, rep};
        auto fail_cell = [&](const GeomError& e) {
          for (const std::string& m : metrics) records.push_back(em.make(0, m, kNaN, error_code_name(e.code())));
        };

        // Annulus points depend on the repetition only, so every sigma and N
        // sees the same feet, normals and relative radii.
        std::vector<EvalPoint> pts;
        try {
          Rng ann = Rng::stream(cfg.seed, {exp_id, kTagAnnulus, static_cast<std::uint64_t>(rep)});
          pts = eval_annulus(spec, sigma, cfg.annulus, ann);
        } catch (const GeomError& e) {
          fail_cell(e);
          continue;
        }

        SampleSet samples;
        if (cfg.mode == Mode::Sample) {
          Rng rng = Rng::stream(cfg.seed, {exp_id, si, ni, static_cast<std::uint64_t>(rep)});
          samples = add_noise(sample_uniform(spec, n, rng), sigma, rng);
          samples.spec = spec;
          samples.seed = cfg.seed;
        }

        if (cfg.kind == ExperimentKind::GeodesicShortcut) {
          std::vector<std::vector<ExperimentRecord>> per(cfg.geodesic_pairs);
          run_geodesics(cfg, sigma, si, ni, rep, cfg.mode == Mode::Sample ? &samples : nullptr, pts, em, per);
          for (auto& v : per) records.insert(records.end(), v.begin(), v.end());
          continue;
        }

        std::unique_ptr<Source> src;
        try {
          src = std::make_unique<Source>(cfg, sigma, cfg.mode == Mode::Sample ? &samples : nullptr);
        } catch (const GeomError& e) {
          fail_cell(e);
          continue;
        }
        std::vector<std::vector<ExperimentRecord>> per(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) { point_metrics(cfg, *src, pts[i], i, em, per[i]); });
        if (cfg.kind == ExperimentKind::TangentBaseline) {
          std::vector<std::vector<ExperimentRecord>> lp(pts.size());
          run_lpca(cfg, *src, samples, pts, em, lp);
          for (std::size_t i = 0; i < pts.size(); ++i) per[i].insert(per[i].end(), lp[i].begin(), lp[i].end());
        }
        for (auto& v : per) records.insert(records.end(), v.begin(), v.end());
        if (cfg.kind == ExperimentKind::PopulationRates) run_residual(cfg, *src, pts, em, records);
      }
    }
  }
  return records;
}

std::vector<ExperimentRecord> run_and_persist(const ExperimentConfig& cfg) {
  std::vector<ExperimentRecord> records = run_experiment(cfg);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output_path, ec);
  if (ec) throw GeomError(ErrorCode::ConfigError, "cannot create output directory '" + cfg.output_path + "'");
  {
    std::ofstream os(fs::path(cfg.output_path) / "records.csv", std::ios::binary);
    if (!os) throw GeomError(ErrorCode::ConfigError, "cannot write records.csv under '" + cfg.output_path + "'");
    write_records_csv(os, records);
  }
  nlohmann::json summary = summary_to_json(summarize(records));
  summary["experiment"] = cfg.name();
  summary["config_hash"] = config_hash(cfg);
  summary["config"] = config_to_json(cfg);
  summary["config"].erase("output_path");
  std::ofstream js(fs::path(cfg.output_path) / "summary.json", std::ios::binary);
  if (!js) throw GeomError(ErrorCode::ConfigError, "cannot write summary.json under '" + cfg.output_path + "'");
  js << summary.dump(2) << '\n';
  return records;
}

}  // namespace geom
