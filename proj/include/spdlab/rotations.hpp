#pragma once

#include "spdlab/core.hpp"

#include <Eigen/Core>

namespace spdlab {

/// Element of SO(d), d in {2, 3}.
///
/// Construction checks orthogonality: matrices with ||R^T R - I||_F above 1e-8
/// or negative determinant are rejected, drift between 1e-10 and 1e-8 is
/// removed by polar projection.
class Rotation {
 public:
  explicit Rotation(const Mat& r);

  static Rotation identity(int d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  Rotation transpose() const;
  Vec apply(const Vec& v) const { return m_ * v; }

  friend Rotation operator*(const Rotation& a, const Rotation& b);

 private:
  struct Trusted {};
  Rotation(Mat m, Trusted) : m_(std::move(m)) {}

  Mat m_;
};

/// Lie-algebra coordinates of a rotation.
///
/// In 3D this is the Euler vector w (axis times angle); in 2D it is the
/// signed angle phi about the out-of-plane axis. Values are reduced onto the
/// canonical ball ||w|| <= pi on construction.
class EulerVector {
 public:
  static EulerVector planar(double phi);
  static EulerVector spatial(const Eigen::Vector3d& w);
  static EulerVector zero(int d);

  int dim() const { return dim_; }
  /// Rotation angle ||w|| in [0, pi].
  double angle() const;
  /// Signed angle; only meaningful in 2D.
  double planar_angle() const { return w_.z(); }
  /// Full 3-vector; for d = 2 this is (0, 0, phi).
  const Eigen::Vector3d& vector() const { return w_; }

 private:
  EulerVector(int d, const Eigen::Vector3d& w) : dim_(d), w_(w) {}

  int dim_;
  Eigen::Vector3d w_;
};

/// Element of so(d). Stored exactly antisymmetric.
class SkewMat {
 public:
  explicit SkewMat(const Mat& w);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  double frobenius_norm() const { return m_.norm(); }

 private:
  Mat m_;
};

SkewMat skew_from_euler(const EulerVector& w);
EulerVector euler_from_skew(const SkewMat& w);

/// Closed-form exponential of skew_from_euler(w).
Rotation rodrigues_exp(const EulerVector& w);

struct RotationLog {
  EulerVector w;
  /// True when the angle is pi to working precision, where the axis sign is
  /// not determined by R. The returned axis then has its first nonzero
  /// component positive.
  bool antipodal = false;
};

/// Principal logarithm, angle in [0, pi].
RotationLog rotation_log(const Rotation& r);

/// Inverse Rodrigues formula W = asin(a)/a * (R - R^T)/2.
/// Only injective for angles up to pi/2; kept for comparison with rotation_log.
EulerVector rotation_log_arcsin(const Rotation& r);

/// Counterclockwise planar rotation.
Rotation rotation_2d(double phi);

/// Rotation angle of r, in [0, pi].
double rotation_angle(const Rotation& r);

/// Rotation about axis from x cross y by the angle between two unit 3-vectors,
/// so that result * from == to. Antiparallel inputs use an arbitrary
/// perpendicular axis.
Rotation rotation_between(const Eigen::Vector3d& from, const Eigen::Vector3d& to);

/// Orthogonal polar factor of a (closest orthogonal matrix in Frobenius norm).
Mat polar_orthogonal(const Mat& a);

}  // namespace spdlab
