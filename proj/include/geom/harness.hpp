#pragma once

#include "geom/baselines.hpp"
#include "geom/kde.hpp"
#include "geom/metrics.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace geom {

enum class ExperimentKind {
  TangentSigmaSweep,
  TangentNSweep,
  TangentBaseline,
  CurvatureTorus,
  CurvatureClifford,
  UmbilicalSphere,
  DimensionCheck,
  GeodesicShortcut,
  PopulationRates,
  LevelSet,
};

enum class Mode { Oracle, Sample };

const char* experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::TangentSigmaSweep;
  ManifoldSpec manifold;
  std::vector<double> sigmas;
  std::vector<std::size_t> ns;
  std::uint64_t seed = 0;
  AnnulusOptions annulus;
  int repetitions = 1;
  std::string output_path;
  Mode mode = Mode::Oracle;

  // Optional knobs with declared defaults.
  bool allow_large_n = false;  // required for N above 30000
  int grid_res = 0;            // oracle quadrature, 0 = automatic
  std::size_t geodesic_pairs = 50;
  std::size_t n_interior = 100;
  int geodesic_steps = 300;
  double geodesic_tolerance = 1e-6;

  std::string name() const { return experiment_name(kind); }
};

/// Throws ConfigError on schema or validation failures.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

/// Stable FNV-1a hash of the canonical config JSON, hex encoded.
std::string config_hash(const ExperimentConfig& cfg);

struct ExperimentRecord {
  std::string experiment;
  std::string manifold;
  double sigma = 0.0;
  std::size_t n = 0;
  int rep = 0;
  std::size_t point_id = 0;
  std::string metric;
  double value = 0.0;
  std::string flag;  // empty, or the error code name of a failed point

  bool failed() const { return !flag.empty(); }
};

bool operator==(const ExperimentRecord& a, const ExperimentRecord& b);

/// Sine of the largest principal angle between the column spans.
double err_tan(const TangentFrame& truth, const TangentFrame& estimate);
double err_tan(const Mat& truth, const Mat& estimate);

/// Euclidean distance between mean curvature vectors.
double err_curv(const Vec& truth, const Vec& estimate);

/// Appends floor(sqrt(N)) points spaced evenly on [w1, w2], each perturbed
/// by N(0, sigma^2 I) with the sample's sigma.
SampleSet shortcut_inject(const SampleSet& samples, const Vec& w1, const Vec& w2, Rng& rng);

/// Linear interpolation adding `factor - 1` points inside every segment.
std::vector<Vec> densify(const std::vector<Vec>& path, std::size_t factor);

/// Runs the experiment; per-point failures become flagged rows.
std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& cfg);

/// run_experiment followed by writing records.csv and summary.json under
/// cfg.output_path.
std::vector<ExperimentRecord> run_and_persist(const ExperimentConfig& cfg);

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);

struct BoxStats {
  std::size_t count = 0;     // finite values
  std::size_t failures = 0;  // flagged or non-finite rows
  double median = 0.0, q1 = 0.0, q3 = 0.0;
  double whisker_lo = 0.0, whisker_hi = 0.0;
  std::size_t outliers = 0;
  double min = 0.0, max = 0.0;
};

/// Type-7 (linear interpolation) quantile of sorted values.
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Box-plot statistics; throws EmptyGroup when no value is finite.
BoxStats box_stats(const std::vector<double>& values);

struct SummaryGroup {
  std::string experiment;
  std::string metric;
  double sigma = 0.0;
  std::size_t n = 0;
  std::optional<BoxStats> stats;  // empty when every row failed
  std::size_t failures = 0;
  std::size_t rows = 0;
};

/// Groups by (experiment, metric, sigma, n) in first-seen order. Throws
/// EmptyGroup for an empty record list.
std::vector<SummaryGroup> summarize(const std::vector<ExperimentRecord>& records);
nlohmann::json summary_to_json(const std::vector<SummaryGroup>& groups);

/// Median of the finite values of one group; NaN when the group is absent.
double group_median(const std::vector<SummaryGroup>& groups, const std::string& metric, double sigma, std::size_t n);

/// Quick invariant checks; prints one line per check and returns the number
/// of failures.
int selftest(std::ostream& os);

}  // namespace geom
