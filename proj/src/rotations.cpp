#include "spdlab/rotations.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spdlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kKeepTol = 1e-10;
constexpr double kRejectTol = 1e-8;
constexpr double kSmallAngle = 1e-4;

Mat hat(const Eigen::Vector3d& w) {
  Mat m(3, 3);
  m << 0.0, -w.z(), w.y(),  //
      w.z(), 0.0, -w.x(),   //
      -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Vector3d vee(const Mat& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

}  // namespace

Mat polar_orthogonal(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Rotation::Rotation(const Mat& r) : m_(r) {
  require(r.rows() == r.cols(), "rotation must be square");
  check_dim(static_cast<int>(r.rows()));
  require(r.allFinite(), "rotation has non-finite entries");
  const int d = dim();
  const double drift = (r.transpose() * r - Mat::Identity(d, d)).norm();
  if (drift > kRejectTol) {
    throw ValidationError("matrix is not orthogonal (||R^T R - I||_F = " + std::to_string(drift) +
                          ")");
  }
  if (r.determinant() <= 0.0) throw ValidationError("rotation must have determinant +1");
  if (drift > kKeepTol) m_ = polar_orthogonal(r);
}

Rotation Rotation::identity(int d) {
  check_dim(d);
  return Rotation(Mat::Identity(d, d), Trusted{});
}

Rotation Rotation::transpose() const { return Rotation(m_.transpose(), Trusted{}); }

Rotation operator*(const Rotation& a, const Rotation& b) {
  require(a.dim() == b.dim(), "rotation dimension mismatch");
  return Rotation(a.m_ * b.m_);
}

EulerVector EulerVector::planar(double phi) {
  require(std::isfinite(phi), "angle must be finite");
  double r = std::remainder(phi, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return EulerVector(2, Eigen::Vector3d(0.0, 0.0, r));
}

EulerVector EulerVector::spatial(const Eigen::Vector3d& w) {
  require(w.allFinite(), "Euler vector must be finite");
  const double phi = w.norm();
  if (phi <= kPi) return EulerVector(3, w);
  const double r = std::remainder(phi, 2.0 * kPi);
  return EulerVector(3, w * (r / phi));
}

EulerVector EulerVector::zero(int d) {
  check_dim(d);
  return EulerVector(d, Eigen::Vector3d::Zero());
}

double EulerVector::angle() const { return dim_ == 2 ? std::abs(w_.z()) : w_.norm(); }

SkewMat::SkewMat(const Mat& w) {
  require(w.rows() == w.cols(), "skew matrix must be square");
  check_dim(static_cast<int>(w.rows()));
  const double scale = std::max(1.0, w.norm());
  require((w + w.transpose()).norm() <= 1e-12 * scale, "matrix is not skew-symmetric");
  m_ = 0.5 * (w - w.transpose());
}

SkewMat skew_from_euler(const EulerVector& w) {
  if (w.dim() == 3) return SkewMat(hat(w.vector()));
  const double phi = w.planar_angle();
  Mat m(2, 2);
  m << 0.0, -phi, phi, 0.0;
  return SkewMat(m);
}

EulerVector euler_from_skew(const SkewMat& w) {
  if (w.dim() == 2) return EulerVector::planar(w.matrix()(1, 0));
  return EulerVector::spatial(vee(w.matrix()));
}

Rotation rotation_2d(double phi) {
  Mat m(2, 2);
  const double c = std::cos(phi), s = std::sin(phi);
  m << c, -s, s, c;
  return Rotation(m);
}

Rotation rodrigues_exp(const EulerVector& w) {
  if (w.dim() == 2) return rotation_2d(w.planar_angle());
  const double phi = w.angle();
  const double phi2 = phi * phi;
  double a, b;
  if (phi < kSmallAngle) {
    a = 1.0 - phi2 / 6.0 + phi2 * phi2 / 120.0;
    b = 0.5 - phi2 / 24.0 + phi2 * phi2 / 720.0;
  } else {
    a = std::sin(phi) / phi;
    b = (1.0 - std::cos(phi)) / phi2;
  }
  const Mat k = hat(w.vector());
  return Rotation(Mat::Identity(3, 3) + a * k + b * k * k);
}

RotationLog rotation_log(const Rotation& r) {
  const Mat& m = r.matrix();
  if (r.dim() == 2) {
    const double phi = std::atan2(m(1, 0), m(0, 0));
    return {EulerVector::planar(phi), std::abs(std::abs(phi) - kPi) < 1e-12};
  }
  // |s| = sin(phi), trace gives cos(phi).
  const Eigen::Vector3d s = 0.5 * vee(m - m.transpose());
  const double sin_phi = s.norm();
  const double cos_phi = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double phi = std::atan2(sin_phi, cos_phi);

  if (phi < kSmallAngle) {
    const double phi2 = phi * phi;
    return {EulerVector::spatial(s * (1.0 + phi2 / 6.0 + 7.0 * phi2 * phi2 / 360.0)), false};
  }
  if (phi <= 0.5 * kPi) return {EulerVector::spatial(s * (phi / sin_phi)), false};

  // Large angles: axis from the symmetric part, cos I + (1 - cos) a a^T.
  const Mat aat = (0.5 * (m + m.transpose()) - cos_phi * Mat::Identity(3, 3)) / (1.0 - cos_phi);
  Eigen::Index k = 0;
  aat.diagonal().maxCoeff(&k);
  Eigen::Vector3d axis = aat.col(k);
  axis.normalize();
  bool antipodal = false;
  if (sin_phi > 1e-12) {
    if (axis.dot(s) < 0.0) axis = -axis;
  } else {
    antipodal = true;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis(i)) > 1e-12) {
        if (axis(i) < 0.0) axis = -axis;
        break;
      }
    }
  }
  return {EulerVector::spatial(axis * phi), antipodal};
}

EulerVector rotation_log_arcsin(const Rotation& r) {
  const Mat s = 0.5 * (r.matrix() - r.matrix().transpose());
  const double alpha = std::sqrt(0.5 * (s * s.transpose()).trace());
  const double factor = alpha < kSmallAngle ? 1.0 + alpha * alpha / 6.0 : std::asin(alpha) / alpha;
  return euler_from_skew(SkewMat(factor * s));
}

double rotation_angle(const Rotation& r) { return rotation_log(r).w.angle(); }

Rotation rotation_between(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const Eigen::Vector3d a = from.normalized();
  const Eigen::Vector3d b = to.normalized();
  const Eigen::Vector3d cross = a.cross(b);
  const double sin_phi = cross.norm();
  const double cos_phi = std::clamp(a.dot(b), -1.0, 1.0);
  const double phi = std::atan2(sin_phi, cos_phi);
  if (sin_phi > 1e-12) return rodrigues_exp(EulerVector::spatial(cross / sin_phi * phi));
  if (cos_phi > 0.0) return Rotation::identity(3);
  // Antiparallel: any axis perpendicular to a.
  Eigen::Index k = 0;
  a.cwiseAbs().minCoeff(&k);
  const Eigen::Vector3d axis = a.cross(Eigen::Vector3d::Unit(k)).normalized();
  return rodrigues_exp(EulerVector::spatial(axis * kPi));
}

}  // namespace spdlab
