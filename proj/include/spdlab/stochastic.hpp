#pragma once

#include "spdlab/linalg.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace spdlab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Independent generator for sample `index` of a run seeded with `seed`.
/// Streams depend only on (seed, index), never on how samples are scheduled.
Rng sample_rng(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Symmetry classes

enum class SymmetryClass { Isotropic, PlanIsotropic, Orthotropic };

SymmetryClass parse_symmetry_class(std::string_view name);
std::string symmetry_class_name(SymmetryClass c);

/// Position in the symmetry lattice; larger means more symmetric.
int symmetry_rank(SymmetryClass c);

/// Class implied by eigenvalue multiplicities, ties at relative tolerance `tol`.
SymmetryClass classify_eigenvalues(const Vec& lambda, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Model description

/// Reference tensor Cr = Qr Lr Qr^T together with its declared class.
class ReferenceTensor {
 public:
  ReferenceTensor(Spectrum spectrum, SymmetryClass cls);

  const Spectrum& spectrum() const { return spectrum_; }
  SymmetryClass symmetry() const { return cls_; }
  int dim() const { return spectrum_.dim(); }
  SpdMat tensor() const { return spectrum_.reconstruct(); }

 private:
  Spectrum spectrum_;
  SymmetryClass cls_;
};

enum class Coupling { Identical, Independent };

/// Lognormal eigenvalue model: y_i = log(lambda_i) ~ N(log(ref_i), sigma) with
/// sigma = sqrt(ln(1 + dispersion^2)), so `dispersion` is the coefficient of
/// variation of each lambda_i.
struct ScalingModel {
  ReferenceTensor reference;
  SymmetryClass realisation_class;
  double dispersion;
  Coupling coupling;
  /// 2D only: enforce lambda_1 > lambda_2 in every draw through
  /// y_small = xi1, y_big = xi1 + exp(xi2).
  bool ordered = false;

  void validate() const;
  double log_sigma() const;
};

/// Von Mises (2D, mean angle) or von Mises-Fisher (3D, mean direction)
/// orientation model with concentration eta.
struct OrientationModel {
  int dim = 2;
  double mean_angle = 0.0;
  Eigen::Vector3d mean_direction = Eigen::Vector3d::UnitZ();
  double concentration = 1.0;

  static OrientationModel planar(double mean_angle, double eta);
  static OrientationModel spatial(const Eigen::Vector3d& mean_direction, double eta);
  void validate() const;
};

enum class ModelMode { ScalingOnly, RotationOnly, Combined };

std::string model_mode_name(ModelMode m);
ModelMode parse_model_mode(std::string_view name);

class TensorModel {
 public:
  static TensorModel scaling_only(ScalingModel scaling);
  static TensorModel rotation_only(ReferenceTensor reference, OrientationModel orientation);
  static TensorModel combined(ScalingModel scaling, OrientationModel orientation);

  ModelMode mode() const { return mode_; }
  const ReferenceTensor& reference() const { return reference_; }
  const std::optional<ScalingModel>& scaling() const { return scaling_; }
  const std::optional<OrientationModel>& orientation() const { return orientation_; }
  int dim() const { return reference_.dim(); }
  /// Symmetry class shared by every realisation.
  SymmetryClass realisation_class() const;

 private:
  TensorModel(ModelMode mode, ReferenceTensor reference, std::optional<ScalingModel> scaling,
              std::optional<OrientationModel> orientation);

  ModelMode mode_;
  ReferenceTensor reference_;
  std::optional<ScalingModel> scaling_;
  std::optional<OrientationModel> orientation_;
};

// ---------------------------------------------------------------------------
// Samplers

DiagPos sample_scaling(const ScalingModel& m, Rng& rng);

/// Best-Fisher rejection sampler; result in (-pi, pi].
double sample_von_mises(double mean_angle, double eta, Rng& rng);

/// Von Mises-Fisher on the 2-sphere: inverse CDF of mu^T v, uniform azimuth.
Eigen::Vector3d sample_vmf(const Eigen::Vector3d& mu, double eta, Rng& rng);

/// 2D: rotation by (phi - mean_angle) with phi von Mises.
/// 3D: rotation about mu x v by the angle between mu and a vMF draw v.
Rotation sample_rotation(const OrientationModel& m, Rng& rng);

/// Factored realisation (Lambda, Q) of the model, in the reference ordering.
Spectrum sample_spectrum(const TensorModel& m, Rng& rng);

/// Realisation Q Lambda Q^T.
SpdMat sample_tensor(const TensorModel& m, Rng& rng);

// ---------------------------------------------------------------------------
// Von Mises moments and the 2D Euclidean-mean distortion

/// E[cos(k phi)] for phi ~ von Mises(0, eta), by adaptive quadrature.
double von_mises_moment(double eta, int k);

/// rho2 = E[cos 2 phi] = I2(eta) / I0(eta).
double rho2_von_mises(double eta);

/// Arithmetic mean of R H R^T over von Mises rotations: hyd(H) + rho2 dev(H).
SymMat distorted_euclid_mean_2d(const SymMat& h, double rho2);

}  // namespace spdlab
