#include "geom/oracle.hpp"

#include "geom/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Nodes whose Gaussian factor is below exp(-kCutoff) relative to the
// nearest node are dropped; even after the cubic Hermite factor that keeps
// them under 1e-14 of the total.
constexpr double kCutoff = 45.0;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    x[a] = -z;
    x[b] = z;
    w[a] = w[b] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

int even_at_least(double v, int floor_value) {
  int n = std::max(floor_value, static_cast<int>(std::ceil(v)));
  return n + (n % 2);
}

std::size_t n_unique3(int d) { return static_cast<std::size_t>(d * (d + 1) * (d + 2) / 6); }
std::size_t n_unique2(int d) { return static_cast<std::size_t>(d * (d + 1) / 2); }

}  // namespace

std::vector<int> oracle_resolution(const ManifoldSpec& spec, double sigma, int grid_res) {
  const int d = spec.intrinsic_dim();
  if (grid_res > 0) {
    require(grid_res >= 64, "oracle: grid_res must be at least 64");
    return std::vector<int>(static_cast<std::size_t>(d), grid_res);
  }
  require(sigma > 0.0, "oracle: sigma must be positive");
  // Parameter-space footprint of the kernel is sigma / speed; keep the node
  // spacing below 0.7 of it.
  const double h = 0.7 * sigma;
  switch (spec.kind) {
    case ManifoldKind::Circle: return {even_at_least(kTwoPi * spec.radius / h, 64)};
    case ManifoldKind::Clifford: {
      const int n = even_at_least(kTwoPi * spec.radius / h, 64);
      return {n, n};
    }
    case ManifoldKind::Torus:
      return {even_at_least(kTwoPi * spec.minor / h, 64), even_at_least(kTwoPi * (spec.major + spec.minor) / h, 64)};
    case ManifoldKind::Sphere: {
      std::vector<int> res(static_cast<std::size_t>(d));
      res[0] = even_at_least(kTwoPi * spec.radius / h, 64);
      // Gauss-Legendre spacing mid-interval is about pi^2 / (2 n).
      for (int k = 1; k < d; ++k)
        res[static_cast<std::size_t>(k)] = even_at_least(std::numbers::pi * std::numbers::pi * spec.radius / (2.0 * h), 64);
      return res;
    }
  }
  return {};
}

QuadratureGrid build_grid(const ManifoldSpec& spec, const std::vector<int>& resolution) {
  const int d = spec.intrinsic_dim();
  const int big_d = spec.ambient_dim();
  require(static_cast<int>(resolution.size()) == d, "build_grid: one resolution per parameter");
  QuadratureGrid g;
  g.ambient_dim = big_d;
  g.resolution = resolution;
  const double inv_vol = 1.0 / spec.volume();

  // Per-axis nodes and weights; axis 0 (and axis 1 except on spheres) is a
  // periodic angle.
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(d)), wts(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const int n = resolution[static_cast<std::size_t>(k)];
    auto& xs = nodes[static_cast<std::size_t>(k)];
    auto& ws = wts[static_cast<std::size_t>(k)];
    const bool polar = spec.kind == ManifoldKind::Sphere && k >= 1;
    if (polar) {
      std::vector<double> gx, gw;
      gauss_legendre(n, gx, gw);
      xs.resize(gx.size());
      ws.resize(gw.size());
      for (std::size_t i = 0; i < gx.size(); ++i) {
        xs[i] = 0.5 * std::numbers::pi * (gx[i] + 1.0);
        ws[i] = 0.5 * std::numbers::pi * gw[i] * std::pow(std::sin(xs[i]), k);
      }
    } else {
      xs.resize(static_cast<std::size_t>(n));
      ws.assign(static_cast<std::size_t>(n), kTwoPi / n);
      for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = kTwoPi * i / n;
    }
  }

  std::size_t total = 1;
  for (int n : resolution) total *= static_cast<std::size_t>(n);
  g.coords.resize(total * static_cast<std::size_t>(big_d));
  g.weights.resize(total);
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> params(static_cast<std::size_t>(d));
  for (std::size_t node = 0; node < total; ++node) {
    std::size_t rem = node;
    double w = inv_vol;
    for (int k = d - 1; k >= 0; --k) {
      const auto kk = static_cast<std::size_t>(k);
      const auto n = static_cast<std::size_t>(resolution[kk]);
      idx[kk] = static_cast<int>(rem % n);
      rem /= n;
      params[kk] = nodes[kk][static_cast<std::size_t>(idx[kk])];
      w *= wts[kk][static_cast<std::size_t>(idx[kk])];
    }
    const Vec x = embed(spec, params);
    switch (spec.kind) {
      case ManifoldKind::Circle: w *= spec.radius; break;
      case ManifoldKind::Clifford: w *= spec.radius * spec.radius; break;
      case ManifoldKind::Torus: w *= spec.minor * (spec.major + spec.minor * std::cos(params[0])); break;
      case ManifoldKind::Sphere: w *= std::pow(spec.radius, d); break;
    }
    for (int c = 0; c < big_d; ++c) g.coords[node * static_cast<std::size_t>(big_d) + static_cast<std::size_t>(c)] = x[c];
    g.weights[node] = w;
  }
  return g;
}

namespace {

// Squared distances from y to every node plus their minimum.
double scan_distances(const QuadratureGrid& grid, const Vec& y, std::vector<double>& d2) {
  const std::size_t n = grid.size();
  const auto big_d = static_cast<std::size_t>(grid.ambient_dim);
  d2.resize(n);
  double best = std::numeric_limits<double>::infinity();
  const double* c = grid.coords.data();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < big_d; ++k) {
      const double t = c[i * big_d + k] - y[static_cast<Eigen::Index>(k)];
      s += t * t;
    }
    d2[i] = s;
    best = std::min(best, s);
  }
  return best;
}

double gaussian_normalizer(int big_d, double sigma) {
  return std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.5 * big_d);
}

}  // namespace

double evaluate_density(const QuadratureGrid& grid, const Vec& y, double sigma) {
  require(sigma > 0.0, "oracle: sigma must be positive");
  require(y.size() == grid.ambient_dim, "oracle: wrong ambient dimension");
  thread_local std::vector<double> d2;
  const double shift = scan_distances(grid, y, d2);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> terms;
  terms.reserve(256);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = (d2[i] - shift) * inv2s2;
    if (e > kCutoff) continue;
    terms.push_back(grid.weights[i] * std::exp(-e));
  }
  return pairwise_sum(terms) * std::exp(-shift * inv2s2) * gaussian_normalizer(grid.ambient_dim, sigma);
}

DerivativeBundle evaluate_bundle(const QuadratureGrid& grid, const Vec& y, double sigma) {
  require(sigma > 0.0, "oracle: sigma must be positive");
  require(y.size() == grid.ambient_dim, "oracle: wrong ambient dimension");
  const int big_d = grid.ambient_dim;
  const auto ud = static_cast<std::size_t>(big_d);
  thread_local std::vector<double> d2;
  const double shift = scan_distances(grid, y, d2);
  const double s2 = sigma * sigma;
  const double inv2s2 = 1.0 / (2.0 * s2);

  // Unique components: p, g1 (D), g2 upper (D(D+1)/2), g3 sorted (i<=j<=k).
  const std::size_t width = 1 + ud + n_unique2(big_d) + n_unique3(big_d);
  std::vector<double> rows;
  rows.reserve(width * 256);
  std::vector<double> w(ud);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double e = (d2[n] - shift) * inv2s2;
    if (e > kCutoff) continue;
    const double kern = grid.weights[n] * std::exp(-e);
    for (std::size_t k = 0; k < ud; ++k) w[k] = (grid.coords[n * ud + k] - y[static_cast<Eigen::Index>(k)]) / s2;
    const std::size_t base = rows.size();
    rows.resize(base + width);
    double* r = rows.data() + base;
    std::size_t c = 0;
    r[c++] = kern;
    for (std::size_t i = 0; i < ud; ++i) r[c++] = w[i] * kern;
    for (std::size_t i = 0; i < ud; ++i)
      for (std::size_t j = i; j < ud; ++j) r[c++] = (w[i] * w[j] - (i == j ? 1.0 / s2 : 0.0)) * kern;
    for (std::size_t i = 0; i < ud; ++i)
      for (std::size_t j = i; j < ud; ++j)
        for (std::size_t k = j; k < ud; ++k) {
          double t = w[i] * w[j] * w[k];
          double corr = 0.0;
          if (j == k) corr += w[i];
          if (i == k) corr += w[j];
          if (i == j) corr += w[k];
          r[c++] = (t - corr / s2) * kern;
        }
  }
  const std::vector<double> tot = pairwise_reduce(rows, width);
  const double scale = std::exp(-shift * inv2s2) * gaussian_normalizer(big_d, sigma);

  DerivativeBundle b;
  b.point = y;
  b.sigma = sigma;
  b.g1 = Vec::Zero(big_d);
  b.g2 = Mat::Zero(big_d, big_d);
  b.g3 = Tensor3(ud);
  std::size_t c = 0;
  b.p = tot[c++] * scale;
  for (int i = 0; i < big_d; ++i) b.g1[i] = tot[c++] * scale;
  for (int i = 0; i < big_d; ++i)
    for (int j = i; j < big_d; ++j) b.g2(i, j) = b.g2(j, i) = tot[c++] * scale;
  for (std::size_t i = 0; i < ud; ++i)
    for (std::size_t j = i; j < ud; ++j)
      for (std::size_t k = j; k < ud; ++k) {
        const double v = tot[c++] * scale;
        b.g3(i, j, k) = b.g3(i, k, j) = b.g3(j, i, k) = b.g3(j, k, i) = b.g3(k, i, j) = b.g3(k, j, i) = v;
      }
  return b;
}

PopulationOracle::PopulationOracle(ManifoldSpec spec, double sigma, OracleOptions options)
    : spec_(spec), sigma_(sigma), options_(options) {
  require(sigma > 0.0 && std::isfinite(sigma), "oracle: sigma must be positive");
  const std::vector<int> res = oracle_resolution(spec_, sigma_, options_.grid_res);
  grid_ = std::make_shared<QuadratureGrid>(build_grid(spec_, res));
  if (options_.self_check) {
    std::vector<int> doubled = res;
    for (int& n : doubled) n *= 2;
    check_grid_ = std::make_shared<QuadratureGrid>(build_grid(spec_, doubled));
  }
}

DerivativeBundle PopulationOracle::bundle(const Vec& y) const {
  DerivativeBundle b = evaluate_bundle(*grid_, y, sigma_);
  if (check_grid_) {
    const double fine = evaluate_density(*check_grid_, y, sigma_);
    if (std::abs(fine - b.p) > 1e-8 * std::abs(fine))
      throw GeomError(ErrorCode::QuadratureUnderResolved, "density changes under grid doubling");
  }
  return b;
}

double PopulationOracle::density(const Vec& y) const { return evaluate_density(*grid_, y, sigma_); }

DerivativeBundle oracle_bundle(const ManifoldSpec& spec, const Vec& y, double sigma, int grid_res) {
  OracleOptions opts;
  opts.grid_res = grid_res;
  return PopulationOracle(spec, sigma, opts).bundle(y);
}

namespace {

void check_probe_direction(const ManifoldSpec& spec, const Vec& x, const Vec& direction) {
  require(direction.size() == spec.ambient_dim(), "level_set_probe: wrong direction dimension");
  require(std::abs(direction.norm() - 1.0) <= 1e-9, "level_set_probe: direction must be a unit vector");
  const TangentFrame frame = tangent_frame(spec, x);
  const double tangential = (frame.basis().transpose() * direction).norm();
  require(tangential <= 1e-8, "level_set_probe: direction must lie in the normal space");
}

}  // namespace

double level_set_probe(const PopulationOracle& oracle, const Vec& x_in, const Vec& direction) {
  const ManifoldSpec& spec = oracle.spec();
  check_probe_direction(spec, x_in, direction);
  const Vec x = project(spec, x_in);
  const double sigma = oracle.sigma();
  const double s2 = sigma * sigma;
  const double log_p0 = std::log(oracle.density(x));
  auto f = [&](double t) { return std::log(oracle.density(x + t * direction)) - log_p0; };

  const DerivativeBundle b = oracle.bundle(x);
  const double slope = b.g1.dot(direction) / b.p;
  // Leading order f(t) ~ slope t - t^2 / (2 s2).
  const double t_guess = slope > 0.0 ? 2.0 * s2 * slope : s2;
  const double t_max = std::min(0.9 * spec.reach(), 10.0 * sigma);
  double step = std::max(t_guess / 16.0, 1e-6 * s2);

  double lo = 0.0;
  bool initial_positive = slope > 0.0;
  double t = 0.0;
  bool first = true;
  while (t < t_max) {
    const double t_next = std::min(t + step, t_max);
    const double f_next = f(t_next);
    if (first) {
      initial_positive = f_next > 0.0;
      first = false;
      if (f_next == 0.0) return t_next;
    } else {
      const bool crossed = initial_positive ? f_next <= 0.0 : f_next >= 0.0;
      if (crossed) {
        double hi = t_next;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = f(mid);
          if (initial_positive ? fm > 0.0 : fm < 0.0)
            lo = mid;
          else
            hi = mid;
        }
        return 0.5 * (lo + hi);
      }
    }
    lo = t_next;
    t = t_next;
    if (!initial_positive) step *= 1.25;
  }
  throw GeomError(ErrorCode::NoCrossing, "density never returns to its level along the ray");
}

double level_set_probe(const ManifoldSpec& spec, double sigma, const Vec& x, const Vec& direction, int grid_res) {
  require(sigma >= 0.0, "level_set_probe: sigma must be non-negative");
  if (sigma == 0.0) {
    check_probe_direction(spec, x, direction);
    return 0.0;
  }
  OracleOptions opts;
  opts.grid_res = grid_res;
  return level_set_probe(PopulationOracle(spec, sigma, opts), x, direction);
}

double level_set_distance(const PopulationOracle& oracle, const Vec& x, const std::vector<Vec>& directions) {
  double best = 0.0;
  for (const Vec& dir : directions) {
    try {
      best = std::max(best, level_set_probe(oracle, x, dir));
    } catch (const GeomError& e) {
      if (e.code() != ErrorCode::NoCrossing) throw;
    }
  }
  return best;
}

}  // namespace geom
