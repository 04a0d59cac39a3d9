#include "geom/kde.hpp"

#include "geom/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geom {

namespace {

constexpr std::size_t kBlock = 256;

// Position of (a, b), a <= b, in the packed upper triangle.
std::size_t pair_index(std::size_t d, std::size_t a, std::size_t b) { return a * d - a * (a - 1) / 2 + (b - a); }

// Position of (a, b, c), a <= b <= c, in lexicographic packed order.
std::size_t triple_index(std::size_t d, std::size_t a, std::size_t b, std::size_t c) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < a; ++i) pos += (d - i) * (d - i + 1) / 2;
  const std::size_t rem = d - a;
  const std::size_t bb = b - a, cc = c - a;
  return pos + pair_index(rem, bb, cc);
}

}  // namespace

BandwidthPlan BandwidthPlan::per_order(double c, double n, int ambient_dim) {
  BandwidthPlan p;
  p.c = c;
  for (int m = 0; m < 4; ++m) p.h[static_cast<std::size_t>(m)] = bandwidth(c, m, n, ambient_dim);
  return p;
}

BandwidthPlan BandwidthPlan::shared(double h) {
  require(h > 0.0 && std::isfinite(h), "bandwidth must be positive");
  BandwidthPlan p;
  p.c = h;
  p.h = {h, h, h, h};
  return p;
}

double bandwidth(double c, int order, double n, int ambient_dim) {
  require(order >= 0 && order <= 3, "bandwidth: order must be in {0,1,2,3}");
  require(n >= 2.0, "bandwidth: N must be at least 2");
  require(c > 0.0, "bandwidth: constant must be positive");
  return c * std::pow(std::log(n) / n, 1.0 / (ambient_dim + 4 + 2 * order));
}

double scott_constant(const std::vector<Vec>& points, int d) {
  require(d >= 1, "scott_constant: d must be positive");
  if (points.size() < 2 || points.size() < static_cast<std::size_t>(d) + 1)
    throw GeomError(ErrorCode::DegenerateCovariance, "too few samples for a rank-d covariance");
  const Eigen::Index big_d = points.front().size();
  require(d <= big_d, "scott_constant: d exceeds the ambient dimension");
  Vec mean = Vec::Zero(big_d);
  for (const Vec& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Mat cov = Mat::Zero(big_d, big_d);
  for (const Vec& p : points) {
    const Vec c = p - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(points.size() - 1);
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  const Vec ev = es.eigenvalues().reverse();
  if (!(ev[d - 1] > 1e-12 * std::max(ev[0], 1e-300)))
    throw GeomError(ErrorCode::DegenerateCovariance, "sample covariance has rank below d");
  double c = 0.0;
  for (int i = 0; i < d; ++i) c += std::sqrt(ev[i]);
  return c / d;
}

double scott_constant(const SampleSet& samples, int d) { return scott_constant(samples.points, d); }

KernelEstimator::KernelEstimator(const std::vector<Vec>& points) : n_(points.size()) {
  require(n_ >= 1, "kde: need at least one sample");
  dim_ = static_cast<int>(points.front().size());
  coords_.resize(dim_, static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    require(points[i].size() == dim_, "kde: samples must share one dimension");
    coords_.col(static_cast<Eigen::Index>(i)) = points[i].array();
  }
}

double KernelEstimator::density(const Vec& y, double h) const {
  return bundle(y, BandwidthPlan::shared(h), 0).p;
}

DerivativeBundle KernelEstimator::bundle(const Vec& y, const BandwidthPlan& plan, int max_order) const {
  require(y.size() == dim_, "kde: evaluation point has the wrong dimension");
  require(max_order >= 0 && max_order <= 3, "kde: max_order must be in {0,...,3}");
  const Eigen::Index nd = dim_;
  const auto ud = static_cast<std::size_t>(dim_);

  DerivativeBundle b;
  b.point = y;
  b.g1 = Vec::Zero(nd);
  b.g2 = Mat::Zero(nd, nd);
  b.g3 = Tensor3(ud);

  // Raw moments sum_i u^a K(u) are accumulated per block of samples, the
  // block rows are reduced pairwise, and the Hermite corrections that turn
  // moments into kernel derivatives are applied to the totals.
  std::array<bool, 4> done{false, false, false, false};
  for (int m0 = 0; m0 <= max_order; ++m0) {
    if (done[static_cast<std::size_t>(m0)]) continue;
    const double h = plan.h[static_cast<std::size_t>(m0)];
    require(h > 0.0, "kde: bandwidths must be positive");
    int top = m0;
    std::array<bool, 4> want{false, false, false, false};
    for (int m = m0; m <= max_order; ++m)
      if (plan.h[static_cast<std::size_t>(m)] == h) {
        want[static_cast<std::size_t>(m)] = done[static_cast<std::size_t>(m)] = true;
        top = m;
      }
    // Lower moments feed the corrections of the higher orders.
    const bool need1 = top >= 1, need2 = top >= 2, need3 = top >= 3;

    std::size_t width = 1;
    if (need1) width += ud;
    std::size_t off2 = width;
    if (need2) width += ud * (ud + 1) / 2;
    std::size_t off3 = width;
    if (need3) width += ud * (ud + 1) * (ud + 2) / 6;

    std::vector<double> rows;
    rows.reserve(width * (n_ / kBlock + 1));
    const double inv_h = 1.0 / h;
    Eigen::ArrayXXd u(static_cast<Eigen::Index>(kBlock), nd);
    Eigen::ArrayXd r2(static_cast<Eigen::Index>(kBlock)), kern(static_cast<Eigen::Index>(kBlock));
    Eigen::ArrayXd uk(static_cast<Eigen::Index>(kBlock)), uuk(static_cast<Eigen::Index>(kBlock));
    std::vector<double> row(width);
    for (std::size_t start = 0; start < n_; start += kBlock) {
      const auto len = static_cast<Eigen::Index>(std::min(kBlock, n_ - start));
      auto ub = u.topRows(len);
      for (Eigen::Index k = 0; k < nd; ++k)
        ub.col(k) = (coords_.row(k).segment(static_cast<Eigen::Index>(start), len).transpose() - y[k]) * inv_h;
      auto r = r2.head(len);
      r = ub.square().rowwise().sum();
      auto kv = kern.head(len);
      kv = (-0.5 * r).exp();
      std::size_t q = 0;
      row[q++] = kv.sum();
      if (need1)
        for (Eigen::Index a = 0; a < nd; ++a) row[q++] = (ub.col(a) * kv).sum();
      if (need2 || need3)
        for (Eigen::Index a = 0; a < nd; ++a) {
          auto ua = uk.head(len);
          ua = ub.col(a) * kv;
          for (Eigen::Index c2 = a; c2 < nd; ++c2) {
            auto uab = uuk.head(len);
            uab = ua * ub.col(c2);
            if (need2) row[off2 + pair_index(ud, static_cast<std::size_t>(a), static_cast<std::size_t>(c2))] = uab.sum();
            if (need3)
              for (Eigen::Index c3 = c2; c3 < nd; ++c3)
                row[off3 + triple_index(ud, static_cast<std::size_t>(a), static_cast<std::size_t>(c2), static_cast<std::size_t>(c3))] =
                    (uab * ub.col(c3)).sum();
          }
        }
      rows.insert(rows.end(), row.begin(), row.end());
    }
    const std::vector<double> tot = pairwise_reduce(rows, width);
    const double base = std::pow(2.0 * std::numbers::pi, -0.5 * dim_) / static_cast<double>(n_);
    auto scale = [&](int m) { return base * std::pow(inv_h, dim_ + m); };
    auto m1 = [&](std::size_t a) { return tot[1 + a]; };

    if (want[0]) b.p = tot[0] * scale(0);
    if (want[1])
      for (std::size_t a = 0; a < ud; ++a) b.g1[static_cast<Eigen::Index>(a)] = m1(a) * scale(1);
    if (want[2])
      for (std::size_t a = 0; a < ud; ++a)
        for (std::size_t c = a; c < ud; ++c) {
          const double v = (tot[off2 + pair_index(ud, a, c)] - (a == c ? tot[0] : 0.0)) * scale(2);
          b.g2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = v;
          b.g2(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a)) = v;
        }
    if (want[3])
      for (std::size_t a = 0; a < ud; ++a)
        for (std::size_t bb = a; bb < ud; ++bb)
          for (std::size_t cc = bb; cc < ud; ++cc) {
            double corr = 0.0;
            if (bb == cc) corr += m1(a);
            if (a == cc) corr += m1(bb);
            if (a == bb) corr += m1(cc);
            const double v = (tot[off3 + triple_index(ud, a, bb, cc)] - corr) * scale(3);
            b.g3(a, bb, cc) = b.g3(a, cc, bb) = b.g3(bb, a, cc) = b.g3(bb, cc, a) = b.g3(cc, a, bb) = b.g3(cc, bb, a) = v;
          }
  }
  return b;
}

DerivativeBundle kde_bundle(const SampleSet& samples, const Vec& y, const BandwidthPlan& plan) {
  return KernelEstimator(samples.points).bundle(y, plan);
}

}  // namespace geom
