#include "geom/types.hpp"

#include <algorithm>
#include <cmath>

namespace geom {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateProjection: return "DegenerateProjection";
    case ErrorCode::NonUniqueGeodesic: return "NonUniqueGeodesic";
    case ErrorCode::AnnulusExceedsReach: return "AnnulusExceedsReach";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::DensityUnderflow: return "DensityUnderflow";
    case ErrorCode::GradientTooSmall: return "GradientTooSmall";
    case ErrorCode::EigengapCollapse: return "EigengapCollapse";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::InsufficientLocalMass: return "InsufficientLocalMass";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Mat Tensor3::contract_first(const Vec& u) const {
  Mat k = Mat::Zero(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (u[i] == 0.0) continue;
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t l = 0; l < dim_; ++l) k(j, l) += u[i] * (*this)(i, j, l);
  }
  return k;
}

Tensor3 Tensor3::symmetrized() const {
  Tensor3 s(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < dim_; ++k) {
        const auto& t = *this;
        s(i, j, k) = (t(i, j, k) + t(i, k, j) + t(j, i, k) + t(j, k, i) + t(k, i, j) + t(k, j, i)) / 6.0;
      }
  return s;
}

double Tensor3::asymmetry() const {
  double worst = 0.0;
  const auto& t = *this;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t k = 0; k < dim_; ++k) {
        const double v = t(i, j, k);
        for (double w : {t(i, k, j), t(j, i, k), t(j, k, i), t(k, i, j), t(k, j, i)})
          worst = std::max(worst, std::abs(v - w));
      }
  return worst;
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor3 operator-(Tensor3 a, const Tensor3& b) {
  a -= b;
  return a;
}

Tensor3 sym_outer(const Mat& a, const Vec& b) {
  const auto n = static_cast<std::size_t>(b.size());
  Tensor3 t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        t(i, j, k) = a(i, j) * b[k] + a(i, k) * b[j] + a(j, k) * b[i];
  return t;
}

Tensor3 outer3(const Vec& b) {
  const auto n = static_cast<std::size_t>(b.size());
  Tensor3 t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) t(i, j, k) = b[i] * b[j] * b[k];
  return t;
}

Tensor3 rotate(const Tensor3& t, const Mat& q) {
  const std::size_t n = t.dim();
  // Contract one index at a time to stay O(n^4).
  Tensor3 a(n), b(n), c(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += q(p, i) * t(i, j, k);
        a(p, j, k) = s;
      }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += q(r, j) * a(p, j, k);
        b(p, r, k) = s;
      }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t s_ = 0; s_ < n; ++s_) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += q(s_, k) * b(p, r, k);
        c(p, r, s_) = s;
      }
  return c;
}

}  // namespace geom
