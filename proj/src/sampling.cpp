#include "geom/sampling.hpp"

#include "geom/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace geom {

SampleSet add_noise(const std::vector<Vec>& clean, double sigma, Rng& rng) {
  require(sigma >= 0.0 && std::isfinite(sigma), "add_noise: sigma must be non-negative");
  SampleSet out;
  out.sigma = sigma;
  out.points.reserve(clean.size());
  for (const Vec& x : clean) {
    Vec y = x;
    if (sigma > 0.0)
      for (Eigen::Index k = 0; k < y.size(); ++k) y[k] += sigma * rng.normal();
    out.points.push_back(std::move(y));
  }
  return out;
}

std::pair<double, double> annulus_radii(double sigma, const AnnulusOptions& opts) {
  require(sigma > 0.0 && sigma <= 1.0, "annulus: sigma must lie in (0, 1]");
  require(opts.c1 > 0.0 && opts.c1 < opts.c2, "annulus: need 0 < c1 < c2");
  const double scale = sigma * sigma * std::log(1.0 / sigma);
  return {opts.c1 * scale, opts.c2 * scale};
}

std::vector<EvalPoint> eval_annulus(const ManifoldSpec& spec, double sigma, const AnnulusOptions& opts, Rng& rng) {
  const auto [inner, outer] = annulus_radii(sigma, opts);
  if (outer >= spec.reach())
    throw GeomError(ErrorCode::AnnulusExceedsReach, "outer annulus radius reaches the manifold's reach");
  require(opts.nbar >= 1, "annulus: nbar must be positive");
  const std::vector<Vec> feet = sample_uniform(spec, opts.nbar, rng);
  std::vector<EvalPoint> pts;
  pts.reserve(opts.nbar);
  for (const Vec& x : feet) {
    EvalPoint p;
    p.frame = tangent_frame(spec, x);
    p.foot = p.frame.base_point();
    const Mat normals = p.frame.normal_basis();
    Vec z(normals.cols());
    double zn;
    do {
      for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal();
      zn = z.norm();
    } while (zn < 1e-300);
    const Vec nu = normals * (z / zn);
    p.offset = rng.uniform(inner, outer);
    p.w = p.foot + p.offset * nu;
    p.mean_curvature = mean_curvature_true(spec, p.foot);
    pts.push_back(std::move(p));
  }
  return pts;
}

void write_points(std::ostream& os, const SampleSet& samples) {
  nlohmann::json header = manifold_to_json(samples.spec);
  header["D"] = samples.spec.ambient_dim();
  header["d"] = samples.spec.intrinsic_dim();
  header["sigma"] = samples.sigma;
  header["seed"] = samples.seed;
  header["n"] = samples.points.size();
  os << header.dump() << '\n';
  char buf[32];
  for (const Vec& p : samples.points) {
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", p[k]);
      if (k) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

SampleSet read_points(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw GeomError(ErrorCode::InvalidArgument, "point file: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw GeomError(ErrorCode::InvalidArgument, std::string("point file: bad header: ") + e.what());
  }
  SampleSet s;
  s.spec = manifold_from_json(header);
  s.sigma = header.value("sigma", 0.0);
  s.seed = header.value("seed", std::uint64_t{0});
  const int big_d = header.value("D", s.spec.ambient_dim());
  require(big_d == s.spec.ambient_dim(), "point file: D does not match the manifold");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    Vec p(big_d);
    int k = 0;
    while (std::getline(row, cell, ',')) {
      require(k < big_d, "point file: too many columns");
      p[k++] = std::stod(cell);
    }
    require(k == big_d, "point file: too few columns");
    s.points.push_back(std::move(p));
  }
  return s;
}

}  // namespace geom
