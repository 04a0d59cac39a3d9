#include "geom/harness.hpp"
#include "geom/json_io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>

namespace geom {

namespace {

constexpr std::array<const char*, 10> kNames = {
    "tangent_sigma_sweep", "tangent_n_sweep",  "tangent_baseline",  "curvature_torus", "curvature_clifford",
    "umbilical_sphere",    "dimension_check",  "geodesic_shortcut", "population_rates", "level_set",
};

constexpr std::size_t kDefaultNCeiling = 30000;

[[noreturn]] void config_error(const std::string& what) { throw GeomError(ErrorCode::ConfigError, what); }

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) config_error("unknown field '" + it.key() + "' in " + where);
}

void validate(const ExperimentConfig& c) {
  if (c.sigmas.empty()) config_error("sigmas must be nonempty");
  for (double s : c.sigmas)
    if (!(s > 0.0 && s <= 1.0)) config_error("every sigma must lie in (0, 1]");
  if (c.mode == Mode::Sample) {
    if (c.ns.empty()) config_error("ns must be nonempty in sample mode");
    for (std::size_t n : c.ns) {
      if (n < 2) config_error("every N must be at least 2");
      if (n > kDefaultNCeiling && !c.allow_large_n) config_error("N above 30000 requires \"allow_large_n\": true");
    }
  }
  if (c.repetitions < 1) config_error("repetitions must be positive");
  if (c.output_path.empty()) config_error("output_path must be nonempty");
  if (!(c.annulus.c1 > 0.0 && c.annulus.c1 < c.annulus.c2)) config_error("annulus needs 0 < c1 < c2");
  if (c.annulus.nbar < 1) config_error("annulus.nbar must be positive");
  if (c.grid_res < 0) config_error("grid_res must be non-negative");
  if (c.geodesic_pairs < 1 || c.n_interior < 1 || c.geodesic_steps < 0) config_error("invalid geodesic settings");

  const ManifoldKind k = c.manifold.kind;
  switch (c.kind) {
    case ExperimentKind::TangentBaseline:
      if (c.mode != Mode::Sample) config_error("tangent_baseline compares sample-level estimators; use mode sample");
      break;
    case ExperimentKind::PopulationRates:
    case ExperimentKind::LevelSet:
      if (c.mode != Mode::Oracle) config_error(c.name() + " runs on the population oracle; use mode oracle");
      break;
    case ExperimentKind::CurvatureTorus:
      if (c.manifold.codim() != 1) config_error("curvature_torus uses the hypersurface estimator; needs codimension one");
      break;
    case ExperimentKind::UmbilicalSphere:
      if (k != ManifoldKind::Sphere && k != ManifoldKind::Circle)
        config_error("umbilical_sphere needs a totally umbilical manifold (sphere or circle)");
      break;
    case ExperimentKind::GeodesicShortcut:
      if (k != ManifoldKind::Sphere && k != ManifoldKind::Circle)
        config_error("geodesic_shortcut needs analytic geodesics (sphere or circle)");
      break;
    default:
      break;
  }
  if (c.kind == ExperimentKind::LevelSet && c.manifold.codim() != 1)
    config_error("level_set probes a scalar level crossing; needs codimension one");
}

}  // namespace

const char* experiment_name(ExperimentKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

ExperimentKind experiment_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (name == kNames[i]) return static_cast<ExperimentKind>(i);
  config_error("unknown experiment '" + name + "'");
}

namespace {

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  check_keys(j,
             {"name", "manifold", "sigmas", "ns", "seed", "annulus", "repetitions", "output_path", "mode", "allow_large_n",
              "grid_res", "geodesic"},
             "config");
  ExperimentConfig c;
  c.kind = experiment_from_name(get_as<std::string>(j, "name"));
  try {
    c.manifold = manifold_from_json(j.at("manifold"));
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("field 'manifold': ") + e.what());
  } catch (const GeomError& e) {
    config_error(std::string("field 'manifold': ") + e.what());
  }
  c.sigmas = get_as<std::vector<double>>(j, "sigmas");
  if (j.contains("ns")) {
    for (const auto& v : j.at("ns")) {
      if (!v.is_number_integer() || v.get<long long>() < 0) config_error("ns entries must be non-negative integers");
      c.ns.push_back(v.get<std::size_t>());
    }
  }
  // The parser stores non-negative integer literals as unsigned.
  if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) config_error("seed must be a non-negative integer");
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("annulus")) {
    const auto& a = j.at("annulus");
    check_keys(a, {"c1", "c2", "nbar"}, "annulus");
    c.annulus.c1 = a.value("c1", c.annulus.c1);
    c.annulus.c2 = a.value("c2", c.annulus.c2);
    const long long nbar = a.value("nbar", static_cast<long long>(c.annulus.nbar));
    if (nbar < 1) config_error("annulus.nbar must be positive");
    c.annulus.nbar = static_cast<std::size_t>(nbar);
  }
  c.repetitions = j.value("repetitions", 1);
  c.output_path = get_as<std::string>(j, "output_path");
  const std::string mode = get_as<std::string>(j, "mode");
  if (mode == "oracle")
    c.mode = Mode::Oracle;
  else if (mode == "sample")
    c.mode = Mode::Sample;
  else
    config_error("mode must be \"oracle\" or \"sample\"");
  c.allow_large_n = j.value("allow_large_n", false);
  c.grid_res = j.value("grid_res", 0);
  if (j.contains("geodesic")) {
    const auto& g = j.at("geodesic");
    check_keys(g, {"pairs", "n_interior", "steps", "tolerance"}, "geodesic");
    c.geodesic_pairs = g.value("pairs", c.geodesic_pairs);
    c.n_interior = g.value("n_interior", c.n_interior);
    c.geodesic_steps = g.value("steps", c.geodesic_steps);
    c.geodesic_tolerance = g.value("tolerance", c.geodesic_tolerance);
  }
  validate(c);
  return c;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    // Wrongly typed optional fields surface here.
    config_error(e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["name"] = c.name();
  j["manifold"] = manifold_to_json(c.manifold);
  j["sigmas"] = c.sigmas;
  j["ns"] = c.ns;
  j["seed"] = c.seed;
  j["annulus"] = {{"c1", c.annulus.c1}, {"c2", c.annulus.c2}, {"nbar", c.annulus.nbar}};
  j["repetitions"] = c.repetitions;
  j["output_path"] = c.output_path;
  j["mode"] = c.mode == Mode::Oracle ? "oracle" : "sample";
  j["allow_large_n"] = c.allow_large_n;
  j["grid_res"] = c.grid_res;
  j["geodesic"] = {{"pairs", c.geodesic_pairs},
                   {"n_interior", c.n_interior},
                   {"steps", c.geodesic_steps},
                   {"tolerance", c.geodesic_tolerance}};
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    config_error("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  nlohmann::json j = config_to_json(cfg);
  j.erase("output_path");  // where results go does not change them
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace geom
