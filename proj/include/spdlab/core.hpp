#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace spdlab {

/// Dense d x d matrix with d <= 3, stored inline.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
/// Dense d-vector with d <= 3, stored inline.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Input or configuration violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure broke down (overflow, non-convergence, solver failure).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entrywise std::exp and std::log. Unlike Eigen's packet versions, equal
/// inputs give equal outputs regardless of their position in the vector.
inline Vec exp_each(const Vec& y) {
  return y.unaryExpr([](double v) { return std::exp(v); });
}
inline Vec log_each(const Vec& y) {
  return y.unaryExpr([](double v) { return std::log(v); });
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

inline void check_dim(int d) {
  require(d == 2 || d == 3, "dimension must be 2 or 3, got " + std::to_string(d));
}

}  // namespace spdlab
