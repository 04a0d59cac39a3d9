#include "geom/logderiv.hpp"

#include <cmath>
#include <numbers>

namespace geom {

LogDerivBundle log_bundle(const DerivativeBundle& db, double floor) {
  if (!(db.p > floor))
    throw GeomError(ErrorCode::DensityUnderflow, "density at or below the floor");
  LogDerivBundle ld;
  ld.point = db.point;
  ld.sigma = db.sigma;
  const double inv_p = 1.0 / db.p;
  ld.g = db.g1 * inv_p;
  const Mat h = db.g2 * inv_p - ld.g * ld.g.transpose();
  ld.h = 0.5 * (h + h.transpose());

  Tensor3 t = db.g3;
  t *= inv_p;
  t -= sym_outer(ld.h, ld.g);
  t -= outer3(ld.g);
  ld.t = t.symmetrized();
  return ld;
}

double density_peak_proxy(const ManifoldSpec& spec, double sigma) {
  require(sigma > 0.0, "density_peak_proxy: sigma must be positive");
  return std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.5 * spec.codim()) / spec.volume();
}

double relative_floor(const ManifoldSpec& spec, double sigma, double factor) {
  return factor * density_peak_proxy(spec, sigma);
}

}  // namespace geom
