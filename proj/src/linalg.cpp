#include "spdlab/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace spdlab {

namespace {

constexpr double kAsymmetryTol = 1e-8;
constexpr double kSpdFloor = 1e-12;
constexpr double kExpOverflow = 700.0;

bool is_scalar_matrix(const Mat& m) {
  const Eigen::Index d = m.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (m(i, i) != m(0, 0)) return false;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

Mat spectral_apply(const EigenDecomposition& e, const Vec& f) {
  const Mat& q = e.vectors.matrix();
  Mat r = q * f.asDiagonal() * q.transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace

// --- SymMat ---

SymMat::SymMat(const Mat& a) {
  require(a.rows() == a.cols(), "symmetric matrix must be square");
  check_dim(static_cast<int>(a.rows()));
  require(a.allFinite(), "matrix has non-finite entries");
  const double asym = (a - a.transpose()).norm();
  if (asym > kAsymmetryTol * a.norm()) {
    throw ValidationError("matrix is not symmetric (||A - A^T||_F = " + std::to_string(asym) + ")");
  }
  m_ = 0.5 * (a + a.transpose());
}

SymMat SymMat::zero(int d) {
  check_dim(d);
  return SymMat(Mat::Zero(d, d), Trusted{});
}

SymMat SymMat::identity(int d) {
  check_dim(d);
  return SymMat(Mat::Identity(d, d), Trusted{});
}

SymMat SymMat::diagonal(const Vec& diag) {
  check_dim(static_cast<int>(diag.size()));
  return SymMat(Mat(diag.asDiagonal()), Trusted{});
}

SymMat operator+(const SymMat& a, const SymMat& b) {
  require(a.dim() == b.dim(), "dimension mismatch");
  return SymMat(a.m_ + b.m_, SymMat::Trusted{});
}

SymMat operator-(const SymMat& a, const SymMat& b) {
  require(a.dim() == b.dim(), "dimension mismatch");
  return SymMat(a.m_ - b.m_, SymMat::Trusted{});
}

SymMat operator*(double s, const SymMat& a) { return SymMat(s * a.m_, SymMat::Trusted{}); }

SymMat SymMat::congruence(const Mat& r) const { return SymMat(r * m_ * r.transpose()); }

// --- SpdMat ---

SpdMat::SpdMat(const SymMat& a) : m_(a.matrix()) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m_, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || !(lo > kSpdFloor * hi)) {
    throw ValidationError("matrix is not positive definite (eigenvalues in [" + std::to_string(lo) +
                          ", " + std::to_string(hi) + "])");
  }
}

SpdMat::SpdMat(const Mat& a) : SpdMat(SymMat(a)) {}

SpdMat SpdMat::identity(int d) { return SpdMat(SymMat::identity(d)); }

SymMat SpdMat::sym() const { return SymMat(m_); }

SpdMat SpdMat::inverse() const {
  const EigenDecomposition e = sym_eig(sym());
  return SpdMat(spectral_apply(e, e.values.cwiseInverse()));
}

SpdMat SpdMat::scaled(double alpha) const {
  require(alpha > 0.0, "scale factor must be positive");
  return SpdMat(Mat(alpha * m_));
}

SpdMat SpdMat::congruence(const Mat& r) const {
  Mat c = r * m_ * r.transpose();
  return SpdMat(Mat(0.5 * (c + c.transpose())));
}

// --- DiagPos / Spectrum ---

DiagPos::DiagPos(const Vec& diag) : v_(diag) {
  check_dim(static_cast<int>(diag.size()));
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    require(std::isfinite(diag(i)) && diag(i) > 0.0, "diagonal entries must be positive");
  }
}

SpdMat Spectrum::reconstruct() const {
  require(rotation.dim() == scaling.dim(), "spectrum dimension mismatch");
  const Mat& q = rotation.matrix();
  Mat c = q * scaling.values().asDiagonal() * q.transpose();
  return SpdMat(Mat(0.5 * (c + c.transpose())));
}

Mat EigenDecomposition::reconstruct() const {
  return vectors.matrix() * values.asDiagonal() * vectors.matrix().transpose();
}

// --- spectral calculus ---

EigenDecomposition sym_eig(const SymMat& s) {
  const int d = s.dim();
  if (is_scalar_matrix(s.matrix())) {
    return {Rotation::identity(d), s.matrix().diagonal()};
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(s.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  // Eigen returns ascending order.
  Vec values = es.eigenvalues().reverse();
  Mat q = es.eigenvectors().rowwise().reverse();
  if (q.determinant() < 0.0) q.col(d - 1) *= -1.0;
  return {Rotation(q), values};
}

Spectrum spd_spectrum(const SpdMat& c) {
  EigenDecomposition e = sym_eig(c.sym());
  return {std::move(e.vectors), DiagPos(e.values)};
}

SpdMat spd_exp(const SymMat& h) {
  const EigenDecomposition e = sym_eig(h);
  if (e.values.maxCoeff() > kExpOverflow) {
    throw NumericalError("matrix exponential overflows (eigenvalue " +
                         std::to_string(e.values.maxCoeff()) + " > 700)");
  }
  return SpdMat(spectral_apply(e, exp_each(e.values)));
}

SymMat spd_log(const SpdMat& c) {
  const EigenDecomposition e = sym_eig(c.sym());
  return SymMat(spectral_apply(e, log_each(e.values)));
}

SpdMat spd_sqrt(const SpdMat& c) {
  const EigenDecomposition e = sym_eig(c.sym());
  return SpdMat(spectral_apply(e, e.values.array().sqrt().matrix()));
}

SpdMat spd_inv_sqrt(const SpdMat& c) {
  const EigenDecomposition e = sym_eig(c.sym());
  return SpdMat(spectral_apply(e, e.values.array().rsqrt().matrix()));
}

HydDevSplit hyd_dev_split(const SymMat& h) {
  const int d = h.dim();
  const SymMat hyd = (h.trace() / d) * SymMat::identity(d);
  return {hyd, h - hyd};
}

SpdMat nondimensionalize(const SpdMat& c, const SpdMat& ref) {
  require(c.dim() == ref.dim(), "dimension mismatch");
  const Spectrum s = spd_spectrum(ref);
  const Mat a = s.rotation.matrix() * s.scaling.values().array().rsqrt().matrix().asDiagonal();
  return c.congruence(a);
}

double frobenius_inner(const SymMat& a, const SymMat& b) {
  require(a.dim() == b.dim(), "dimension mismatch");
  return (a.matrix().transpose() * b.matrix()).trace();
}

}  // namespace spdlab
