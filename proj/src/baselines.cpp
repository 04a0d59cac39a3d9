#include "geom/baselines.hpp"

#include "geom/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geom {

double lpca_bandwidth(double c, std::size_t n, int d) {
  require(c > 0.0 && n >= 1 && d >= 1, "lpca_bandwidth: invalid inputs");
  return c * std::pow(static_cast<double>(n), -1.0 / (d + 4));
}

TangentEstimate lpca_tangent(const std::vector<Vec>& samples, const Vec& y, const LpcaConfig& cfg) {
  require(cfg.h > 0.0, "lpca: bandwidth must be positive");
  require(!samples.empty(), "lpca: no samples");
  const Eigen::Index dim = y.size();
  require(cfg.d >= 1 && cfg.d < dim, "lpca: need 1 <= d < D");

  // Log-weights relative to the nearest sample keep the ratios finite even
  // when every raw weight underflows.
  const std::size_t n = samples.size();
  std::vector<double> logw(n);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    logw[i] = -0.5 * (samples[i] - y).squaredNorm() / (cfg.h * cfg.h);
    best = std::max(best, logw[i]);
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(logw[i] - best);
  const double total = pairwise_sum(w);
  // total is sum w / max w. A nearest sample beyond ~9.5 h carries a raw
  // weight below e^-45 and is treated as no local mass at all.
  if (best < -45.0 || total < cfg.d + 1.0)
    throw GeomError(ErrorCode::InsufficientLocalMass, "effective local sample size below d + 1");

  const auto ud = static_cast<std::size_t>(dim);
  std::vector<double> rows(n * ud);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < ud; ++k) rows[i * ud + k] = w[i] * samples[i][static_cast<Eigen::Index>(k)];
  const std::vector<double> msum = pairwise_reduce(rows, ud);
  Vec mu(dim);
  for (std::size_t k = 0; k < ud; ++k) mu[static_cast<Eigen::Index>(k)] = msum[k] / total;

  const std::size_t wc = ud * ud;
  rows.assign(n * wc, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec c = samples[i] - mu;
    for (std::size_t a = 0; a < ud; ++a)
      for (std::size_t b = 0; b < ud; ++b)
        rows[i * wc + a * ud + b] = w[i] * c[static_cast<Eigen::Index>(a)] * c[static_cast<Eigen::Index>(b)];
  }
  const std::vector<double> csum = pairwise_reduce(rows, wc);
  Mat cov(dim, dim);
  for (std::size_t a = 0; a < ud; ++a)
    for (std::size_t b = 0; b < ud; ++b)
      cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = csum[a * ud + b] / total;
  return spectral_frame(cov, y, cfg.d);
}

TangentEstimate lpca_tangent(const SampleSet& samples, const Vec& y, const LpcaConfig& cfg) {
  return lpca_tangent(samples.points, y, cfg);
}

}  // namespace geom
