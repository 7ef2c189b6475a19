#pragma once

// Hand-rolled generators and independent oracles shared by the test suites.

#include "spdlab/linalg.hpp"
#include "spdlab/stochastic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace spdlab::testing {

inline constexpr double kPi = std::numbers::pi;

inline double normal(Rng& rng, double sd = 1.0) {
  return std::normal_distribution<double>(0.0, sd)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Euler vector with uniform direction and angle uniform in [0, max_angle).
inline EulerVector random_euler(int d, Rng& rng, double max_angle = kPi) {
  const double angle = uniform(rng, 0.0, max_angle);
  if (d == 2) return EulerVector::planar(uniform(rng, 0.0, 1.0) < 0.5 ? -angle : angle);
  Eigen::Vector3d axis(normal(rng), normal(rng), normal(rng));
  return EulerVector::spatial(axis.normalized() * angle);
}

inline Rotation random_rotation(int d, Rng& rng) { return rodrigues_exp(random_euler(d, rng)); }

inline Vec random_vec(int d, Rng& rng, double sd = 1.0) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = normal(rng, sd);
  return v;
}

inline SymMat random_sym(int d, Rng& rng, double sd = 1.0) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = normal(rng, sd);
  }
  return SymMat(0.5 * (a + a.transpose()));
}

/// Q exp(diag(y)) Q^T with y ~ N(0, log_sd).
inline SpdMat random_spd(int d, Rng& rng, double log_sd = 1.0) {
  const Mat q = random_rotation(d, rng).matrix();
  const Vec y = random_vec(d, rng, log_sd);
  return SpdMat(Mat(q * y.array().exp().matrix().asDiagonal() * q.transpose()));
}

/// Two SPD matrices sharing an eigenbasis.
inline std::pair<SpdMat, SpdMat> random_commuting_pair(int d, Rng& rng) {
  const Mat q = random_rotation(d, rng).matrix();
  auto make = [&] {
    const Vec y = random_vec(d, rng);
    return SpdMat(Mat(q * y.array().exp().matrix().asDiagonal() * q.transpose()));
  };
  SpdMat a = make();
  SpdMat b = make();
  return {a, b};
}

/// exp(A) by a 20-term Taylor series after scaling A to norm <= 1/2, then
/// repeated squaring.
inline Eigen::MatrixXd expm_series(const Eigen::MatrixXd& a) {
  int squarings = 0;
  double norm = a.norm();
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXd x = a / std::ldexp(1.0, squarings);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 20; ++k) {
    term = term * x / k;
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Modified Bessel I_n(x) from its power series, summed in log space.
inline double bessel_i_series(int n, double x) {
  double sum = 0.0;
  const double lx = std::log(x / 2.0);
  for (int k = 0; k < 2000; ++k) {
    const double lt = (2 * k + n) * lx - std::lgamma(k + 1.0) - std::lgamma(k + n + 1.0);
    const double t = std::exp(lt - x);  // scaled by exp(-x)
    sum += t;
    if (k > x && t < 1e-20 * sum) break;
  }
  return sum;  // I_n(x) exp(-x)
}

/// Generalized-eigenvalue form of the affine-invariant distance:
/// sqrt(sum log^2 mu) with C2 v = mu C1 v.
inline double affine_distance_pencil(const SpdMat& c1, const SpdMat& c2) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Eigen::MatrixXd(c2.matrix()),
                                                                Eigen::MatrixXd(c1.matrix()));
  return std::sqrt(ges.eigenvalues().array().log().square().sum());
}

}  // namespace spdlab::testing
