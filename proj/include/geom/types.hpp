#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace geom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Failure categories surfaced by the library. The harness writes the
/// name of the code into the `flag` column of a failed record.
enum class ErrorCode {
  InvalidArgument,
  DegenerateProjection,
  NonUniqueGeodesic,
  AnnulusExceedsReach,
  QuadratureUnderResolved,
  NoCrossing,
  DegenerateCovariance,
  DensityUnderflow,
  GradientTooSmall,
  EigengapCollapse,
  NonFiniteObjective,
  InsufficientLocalMass,
  EmptyGroup,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

class GeomError : public std::runtime_error {
 public:
  GeomError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw GeomError(ErrorCode::InvalidArgument, what);
}

/// Dense D x D x D tensor stored row-major. Used for third derivatives,
/// which are always fully symmetric when produced by this library.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(std::size_t dim) : dim_(dim), data_(dim * dim * dim, 0.0) {}

  std::size_t dim() const noexcept { return dim_; }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dim_ + j) * dim_ + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dim_ + j) * dim_ + k];
  }

  /// K_{jk} = sum_i u_i T_{ijk}.
  Mat contract_first(const Vec& u) const;

  /// Average over all six index permutations.
  Tensor3 symmetrized() const;

  /// max |T_{ijk} - T_{sigma(ijk)}| over all permutations.
  double asymmetry() const;

  double max_abs() const;

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  Tensor3& operator*=(double s);

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

Tensor3 operator-(Tensor3 a, const Tensor3& b);

/// (A (x) b)_{ijk} = A_ij b_k + A_ik b_j + A_jk b_i.
Tensor3 sym_outer(const Mat& a, const Vec& b);

/// b (x) b (x) b.
Tensor3 outer3(const Vec& b);

/// Q applied on every index: T'_{abc} = Q_ai Q_bj Q_ck T_ijk.
Tensor3 rotate(const Tensor3& t, const Mat& q);

}  // namespace geom
