#include "geom/json_io.hpp"

namespace geom {

nlohmann::json manifold_to_json(const ManifoldSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind_name();
  switch (spec.kind) {
    case ManifoldKind::Torus:
      j["R"] = spec.major;
      j["r"] = spec.minor;
      break;
    case ManifoldKind::Sphere:
      j["a"] = spec.radius;
      j["d"] = spec.sphere_dim;
      break;
    default: j["a"] = spec.radius; break;
  }
  return j;
}

ManifoldSpec manifold_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw GeomError(ErrorCode::ConfigError, "manifold needs a string \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  auto num = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw GeomError(ErrorCode::ConfigError, std::string("manifold field ") + key + " must be a number");
    return j[key].get<double>();
  };
  try {
    if (kind == "torus") return ManifoldSpec::torus(num("R", 2.0), num("r", 1.0));
    if (kind == "clifford") return ManifoldSpec::clifford(num("a", 1.0));
    if (kind == "circle") return ManifoldSpec::circle(num("a", 1.0));
    if (kind == "sphere") return ManifoldSpec::sphere(num("a", 1.0), static_cast<int>(num("d", 2.0)));
  } catch (const GeomError& e) {
    throw GeomError(ErrorCode::ConfigError, e.what());
  }
  throw GeomError(ErrorCode::ConfigError, "unknown manifold kind '" + kind + "'");
}

}  // namespace geom
