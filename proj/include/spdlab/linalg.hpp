#pragma once

#include "spdlab/core.hpp"
#include "spdlab/rotations.hpp"

namespace spdlab {

/// Symmetric d x d matrix, an element of Sym(d).
///
/// The input is symmetrized as (A + A^T)/2. Inputs with
/// ||A - A^T||_F > 1e-8 ||A||_F are rejected.
class SymMat {
 public:
  explicit SymMat(const Mat& a);

  static SymMat zero(int d);
  static SymMat identity(int d);
  static SymMat diagonal(const Vec& diag);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  friend SymMat operator+(const SymMat& a, const SymMat& b);
  friend SymMat operator-(const SymMat& a, const SymMat& b);
  friend SymMat operator*(double s, const SymMat& a);

  /// R A R^T.
  SymMat congruence(const Mat& r) const;

 private:
  struct Trusted {};
  SymMat(Mat m, Trusted) : m_(std::move(m)) {}

  Mat m_;
};

/// Symmetric positive-definite matrix, an element of Sym+(d).
///
/// Positivity is checked on construction: min eigenvalue > 1e-12 * max
/// eigenvalue and max eigenvalue > 0.
class SpdMat {
 public:
  explicit SpdMat(const Mat& a);
  explicit SpdMat(const SymMat& a);

  static SpdMat identity(int d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Mat& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  SymMat sym() const;

  SpdMat inverse() const;
  double determinant() const { return m_.determinant(); }
  SpdMat scaled(double alpha) const;
  /// A C A^T (A nonsingular).
  SpdMat congruence(const Mat& r) const;

 private:
  Mat m_;
};

/// Diagonal matrix with positive entries, an element of Diag+(d).
class DiagPos {
 public:
  explicit DiagPos(const Vec& diag);

  int dim() const { return static_cast<int>(v_.size()); }
  const Vec& values() const { return v_; }
  double operator[](int i) const { return v_(i); }
  Vec log() const { return log_each(v_); }
  Mat matrix() const { return v_.asDiagonal(); }

 private:
  Vec v_;
};

/// The (Lambda, Q) point of Diag+(d) x SO(d) with C = Q Lambda Q^T.
struct Spectrum {
  Rotation rotation;
  DiagPos scaling;

  int dim() const { return scaling.dim(); }
  SpdMat reconstruct() const;
  /// log Lambda as a vector.
  Vec log_scaling() const { return scaling.log(); }
};

/// Eigendecomposition of a symmetric matrix with real (possibly negative)
/// eigenvalues, sorted descending; vectors form a proper rotation.
struct EigenDecomposition {
  Rotation vectors;
  Vec values;

  Mat reconstruct() const;
};

EigenDecomposition sym_eig(const SymMat& s);
/// Spectrum of an SPD matrix (descending eigenvalues).
Spectrum spd_spectrum(const SpdMat& c);

/// Matrix exponential of a symmetric matrix via its spectrum.
/// Throws NumericalError if an eigenvalue exceeds 700.
SpdMat spd_exp(const SymMat& h);
SymMat spd_log(const SpdMat& c);
SpdMat spd_sqrt(const SpdMat& c);
SpdMat spd_inv_sqrt(const SpdMat& c);

struct HydDevSplit {
  SymMat hydrostatic;
  SymMat deviatoric;
};

/// (tr H / d) I and the trace-free remainder.
HydDevSplit hyd_dev_split(const SymMat& h);

/// Dimensionless form Qr Lr^{-1/2} C Lr^{-1/2} Qr^T from the spectrum of ref.
SpdMat nondimensionalize(const SpdMat& c, const SpdMat& ref);

double frobenius_inner(const SymMat& a, const SymMat& b);

}  // namespace spdlab
