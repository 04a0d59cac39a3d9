#pragma once

#include "geom/manifolds.hpp"

#include <json.hpp>

namespace geom {

/// {"kind": "torus", "R": 2.0, "r": 1.0}, {"kind": "clifford", "a": 1.0},
/// {"kind": "circle", "a": 1.0}, {"kind": "sphere", "a": 1.0, "d": 2}.
/// Missing fields take the default radii.
nlohmann::json manifold_to_json(const ManifoldSpec& spec);
ManifoldSpec manifold_from_json(const nlohmann::json& j);

}  // namespace geom
