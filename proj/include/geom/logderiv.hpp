#pragma once

#include "geom/oracle.hpp"

namespace geom {

/// G = grad log P, H = Hess log P, T = third derivative of log P.
struct LogDerivBundle {
  Vec g;
  Mat h;
  Tensor3 t;
  Vec point;
  double sigma = 0.0;
};

/// Plug-in log-derivatives. Throws DensityUnderflow when db.p <= floor.
LogDerivBundle log_bundle(const DerivativeBundle& db, double floor = 1e-300);

/// Leading-order peak of P_sigma on M, (2 pi sigma^2)^{-(D-d)/2} / V_M. The
/// harness rejects points whose density falls below 1e-8 of this.
double density_peak_proxy(const ManifoldSpec& spec, double sigma);

double relative_floor(const ManifoldSpec& spec, double sigma, double factor = 1e-8);

}  // namespace geom
