#include "geom/metrics.hpp"

#include "geom/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>

namespace geom {

double degenerate_length(const std::vector<Vec>& path, const GradientField& grad_log_p) {
  require(path.size() >= 2, "degenerate_length: need at least two points");
  std::vector<double> terms;
  terms.reserve(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Vec delta = path[i + 1] - path[i];
    const Vec mid = 0.5 * (path[i] + path[i + 1]);
    terms.push_back(std::abs(delta.dot(grad_log_p(mid))));
  }
  return pairwise_sum(terms);
}

namespace {

struct Energy {
  const Vec& a;
  const Vec& b;
  std::size_t n;
  int dim;
  const ScoreField& field;
  double eps;

  Vec point(const Vec& z, std::size_t k) const {
    if (k == 0) return a;
    if (k == n + 1) return b;
    return z.segment(static_cast<Eigen::Index>((k - 1) * static_cast<std::size_t>(dim)), dim);
  }

  /// Objective and gradient; returns +inf when the field is not finite.
  double operator()(const Vec& z, Vec& grad) const {
    grad.setZero(z.size());
    std::vector<double> terms(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const Vec p0 = point(z, i), p1 = point(z, i + 1);
      const Vec delta = p1 - p0;
      const ScoreSample s = field(0.5 * (p0 + p1), true);
      if (!s.g.allFinite() || !s.h.allFinite()) return std::numeric_limits<double>::infinity();
      const double dot = delta.dot(s.g);
      terms[i] = dot * dot + eps * delta.squaredNorm();
      const Vec half_h = 0.5 * (s.h * delta);
      if (i + 1 <= n)
        grad.segment(static_cast<Eigen::Index>(i * static_cast<std::size_t>(dim)), dim) +=
            2.0 * dot * (s.g + half_h) + 2.0 * eps * delta;
      if (i >= 1)
        grad.segment(static_cast<Eigen::Index>((i - 1) * static_cast<std::size_t>(dim)), dim) +=
            2.0 * dot * (half_h - s.g) - 2.0 * eps * delta;
    }
    return pairwise_sum(terms);
  }
};

}  // namespace

GeodesicPath optimize_geodesic(const Vec& a, const Vec& b, std::size_t n_interior, const ScoreField& field,
                               const GeodesicOptions& options) {
  require(n_interior >= 1, "optimize_geodesic: need at least one interior point");
  require(a.size() == b.size(), "optimize_geodesic: endpoint dimensions differ");
  require(options.steps >= 0, "optimize_geodesic: steps must be non-negative");
  const int dim = static_cast<int>(a.size());
  const std::size_t n = n_interior;

  Vec z(static_cast<Eigen::Index>(n * static_cast<std::size_t>(dim)));
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n + 1);
    z.segment(static_cast<Eigen::Index>((k - 1) * static_cast<std::size_t>(dim)), dim) = (1.0 - t) * a + t * b;
  }

  double eps = options.softening;
  if (eps < 0.0) {
    std::vector<double> g2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n + 1);
      const ScoreSample s = field((1.0 - t) * a + t * b, false);
      if (!s.g.allFinite()) throw GeomError(ErrorCode::NonFiniteObjective, "score field not finite on the initial chord");
      g2[i] = s.g.squaredNorm();
    }
    eps = 1e-3 * pairwise_sum(g2) / static_cast<double>(n + 1);
  }
  const Energy energy{a, b, n, dim, field, eps};

  GeodesicPath path;
  path.fixed_endpoints = {a, b};
  path.softening = eps;

  Vec grad;
  double f = energy(z, grad);
  if (!std::isfinite(f)) throw GeomError(ErrorCode::NonFiniteObjective, "objective not finite on the initial chord");
  path.objective_history.push_back(f);

  const double first_step = options.step_size > 0.0 ? options.step_size : 0.1 * options.sigma * options.sigma;
  std::deque<std::pair<Vec, Vec>> memory;  // (s, y) pairs
  Vec trial_grad;
  int it = 0;
  while (it < options.steps && f > 0.0) {
    bool steepest = memory.empty();
    Vec dir;
    if (!steepest) {
      // Two-loop recursion.
      Vec q = grad;
      std::vector<double> alpha(memory.size());
      for (std::size_t m = memory.size(); m-- > 0;) {
        const auto& [s, y] = memory[m];
        alpha[m] = s.dot(q) / y.dot(s);
        q -= alpha[m] * y;
      }
      const auto& [s_last, y_last] = memory.back();
      q *= s_last.dot(y_last) / y_last.squaredNorm();
      for (std::size_t m = 0; m < memory.size(); ++m) {
        const auto& [s, y] = memory[m];
        const double beta = y.dot(q) / y.dot(s);
        q += (alpha[m] - beta) * s;
      }
      dir = -q;
      if (!(dir.dot(grad) < 0.0)) {
        memory.clear();
        steepest = true;
      }
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (steepest) dir = -grad;
      double step = steepest ? first_step : 1.0;
      const double slope = dir.dot(grad);
      for (int halving = 0; halving < 50; ++halving, step *= 0.5) {
        const Vec zt = z + step * dir;
        const double ft = energy(zt, trial_grad);
        if (std::isfinite(ft) && ft <= f + 1e-4 * step * slope && ft < f) {
          const Vec s = zt - z;
          const Vec y = trial_grad - grad;
          if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
            memory.emplace_back(s, y);
            if (static_cast<int>(memory.size()) > options.history) memory.pop_front();
          }
          const double rel = (f - ft) / std::max(std::abs(f), 1e-300);
          z = zt;
          grad = trial_grad;
          f = ft;
          path.objective_history.push_back(f);
          accepted = true;
          if (rel < options.tolerance) path.converged = true;
          break;
        }
      }
      if (!accepted) {
        if (steepest) break;
        memory.clear();
        steepest = true;
      }
    }
    ++it;
    if (!accepted) {
      path.converged = true;
      break;
    }
    if (path.converged) break;
  }
  if (f == 0.0) path.converged = true;
  path.iterations = it;

  path.points.reserve(n + 2);
  for (std::size_t k = 0; k <= n + 1; ++k) path.points.push_back(energy.point(z, k));
  return path;
}

Tensor3 christoffel_degenerate(const LogDerivBundle& ld) {
  const double gn2 = ld.g.squaredNorm();
  if (!(std::sqrt(gn2) >= 1e-8)) throw GeomError(ErrorCode::GradientTooSmall, "gradient norm below 1e-8");
  const auto dim = static_cast<std::size_t>(ld.g.size());
  Tensor3 c(dim);
  for (std::size_t m = 0; m < dim; ++m)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        c(m, i, j) = ld.h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * ld.g[static_cast<Eigen::Index>(m)] / gn2;
  return c;
}

Tensor3 christoffel_conformal(const LogDerivBundle& ld, int d) {
  require(d >= 1, "christoffel_conformal: d must be positive");
  const auto dim = static_cast<std::size_t>(ld.g.size());
  const Vec df = (2.0 / d) * ld.g;
  Tensor3 c(dim);
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        double v = 0.0;
        if (i == k) v += df[static_cast<Eigen::Index>(j)];
        if (j == k) v += df[static_cast<Eigen::Index>(i)];
        if (i == j) v -= df[static_cast<Eigen::Index>(k)];
        c(k, i, j) = v;
      }
  return c;
}

double acceleration_residual(const std::vector<CurveJet>& curve, const ChristoffelField& gamma) {
  double worst = 0.0;
  for (const CurveJet& jet : curve) {
    const Tensor3 c = gamma(jet.position);
    const auto dim = static_cast<std::size_t>(jet.position.size());
    Vec r = jet.acceleration;
    for (std::size_t k = 0; k < dim; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          acc += c(k, i, j) * jet.velocity[static_cast<Eigen::Index>(i)] * jet.velocity[static_cast<Eigen::Index>(j)];
      r[static_cast<Eigen::Index>(k)] += acc;
    }
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  require(!a.empty() && !b.empty(), "hausdorff: both point sets must be nonempty");
  auto directed = [](const std::vector<Vec>& from, const std::vector<Vec>& to) {
    double worst = 0.0;
    for (const Vec& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec& q : to) best = std::min(best, (p - q).squaredNorm());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

void write_path_csv(std::ostream& os, const GeodesicPath& path, const std::string& endpoint_ids,
                    const std::string& config_hash) {
  os << "# endpoints=" << endpoint_ids << " config=" << config_hash << '\n';
  const Eigen::Index dim = path.points.empty() ? 0 : path.points.front().size();
  for (Eigen::Index k = 0; k < dim; ++k) os << (k ? ",x" : "x") << k + 1;
  os << '\n';
  char buf[32];
  for (const Vec& p : path.points) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", p[k]);
      os << (k ? "," : "") << buf;
    }
    os << '\n';
  }
}

}  // namespace geom
