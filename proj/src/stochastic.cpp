#include "spdlab/stochastic.hpp"

#include <Eigen/Geometry>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spdlab {

namespace {

constexpr double kPi = std::numbers::pi;

double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

/// Uniform on (0, 1].
double uniform_open0(Rng& rng) {
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Index pair holding the plane of isotropy: the tied pair of the reference,
/// or (0, 1) when the reference is isotropic.
std::pair<int, int> isotropy_plane(const Vec& lambda) {
  const double scale = lambda.maxCoeff();
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(lambda(i) - lambda(j)) <= 1e-10 * scale) return {i, j};
    }
  }
  return {0, 1};
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng sample_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ index));
}

// --- symmetry classes ---

SymmetryClass parse_symmetry_class(std::string_view name) {
  if (name == "isotropic" || name == "iso") return SymmetryClass::Isotropic;
  if (name == "plan_isotropic" || name == "plan_iso") return SymmetryClass::PlanIsotropic;
  if (name == "orthotropic" || name == "ortho") return SymmetryClass::Orthotropic;
  throw ValidationError("unknown symmetry class '" + std::string(name) + "'");
}

std::string symmetry_class_name(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::Isotropic: return "isotropic";
    case SymmetryClass::PlanIsotropic: return "plan_isotropic";
    case SymmetryClass::Orthotropic: return "orthotropic";
  }
  return "unknown";
}

int symmetry_rank(SymmetryClass c) {
  switch (c) {
    case SymmetryClass::Isotropic: return 2;
    case SymmetryClass::PlanIsotropic: return 1;
    case SymmetryClass::Orthotropic: return 0;
  }
  return -1;
}

SymmetryClass classify_eigenvalues(const Vec& lambda, double tol) {
  const int d = static_cast<int>(lambda.size());
  const double scale = lambda.cwiseAbs().maxCoeff();
  int tied_pairs = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (std::abs(lambda(i) - lambda(j)) <= tol * scale) ++tied_pairs;
    }
  }
  const int all_pairs = d * (d - 1) / 2;
  if (tied_pairs == all_pairs) return SymmetryClass::Isotropic;
  if (tied_pairs == 0) return SymmetryClass::Orthotropic;
  return SymmetryClass::PlanIsotropic;
}

// --- model description ---

ReferenceTensor::ReferenceTensor(Spectrum spectrum, SymmetryClass cls)
    : spectrum_(std::move(spectrum)), cls_(cls) {
  require(!(cls == SymmetryClass::PlanIsotropic && dim() == 2),
          "plan isotropy is not a 2D symmetry class");
  const SymmetryClass actual = classify_eigenvalues(spectrum_.scaling.values());
  require(actual == cls, "reference eigenvalues are " + symmetry_class_name(actual) +
                             " but the declared class is " + symmetry_class_name(cls));
}

void ScalingModel::validate() const {
  require(std::isfinite(dispersion) && dispersion > 0.0, "dispersion must be positive");
  require(!(realisation_class == SymmetryClass::PlanIsotropic && reference.dim() == 2),
          "plan isotropy is not a 2D symmetry class");
  require(symmetry_rank(realisation_class) <= symmetry_rank(reference.symmetry()),
          "realisation class must not be more symmetric than the reference class");
  require((coupling == Coupling::Identical) == (realisation_class == SymmetryClass::Isotropic),
          "identical coupling is required exactly for isotropic realisations");
  if (ordered) {
    require(reference.dim() == 2 && realisation_class == SymmetryClass::Orthotropic &&
                reference.symmetry() == SymmetryClass::Orthotropic,
            "ordered scaling needs a 2D orthotropic reference and realisations");
  }
}

double ScalingModel::log_sigma() const { return std::sqrt(std::log1p(dispersion * dispersion)); }

OrientationModel OrientationModel::planar(double mean_angle, double eta) {
  OrientationModel m;
  m.dim = 2;
  m.mean_angle = mean_angle;
  m.concentration = eta;
  m.validate();
  return m;
}

OrientationModel OrientationModel::spatial(const Eigen::Vector3d& mean_direction, double eta) {
  OrientationModel m;
  m.dim = 3;
  m.mean_direction = mean_direction;
  m.concentration = eta;
  m.validate();
  return m;
}

void OrientationModel::validate() const {
  check_dim(dim);
  require(std::isfinite(concentration) && concentration > 0.0, "concentration must be positive");
  require(std::isfinite(mean_angle), "mean angle must be finite");
  if (dim == 3) {
    require(std::abs(mean_direction.norm() - 1.0) <= 1e-12, "mean direction must be a unit vector");
  }
}

std::string model_mode_name(ModelMode m) {
  switch (m) {
    case ModelMode::ScalingOnly: return "scaling_only";
    case ModelMode::RotationOnly: return "rotation_only";
    case ModelMode::Combined: return "combined";
  }
  return "unknown";
}

ModelMode parse_model_mode(std::string_view name) {
  if (name == "scaling_only") return ModelMode::ScalingOnly;
  if (name == "rotation_only") return ModelMode::RotationOnly;
  if (name == "combined") return ModelMode::Combined;
  throw ValidationError("unknown model mode '" + std::string(name) + "'");
}

TensorModel::TensorModel(ModelMode mode, ReferenceTensor reference,
                         std::optional<ScalingModel> scaling,
                         std::optional<OrientationModel> orientation)
    : mode_(mode),
      reference_(std::move(reference)),
      scaling_(std::move(scaling)),
      orientation_(std::move(orientation)) {
  if (scaling_) scaling_->validate();
  if (orientation_) {
    orientation_->validate();
    require(orientation_->dim == reference_.dim(), "orientation model dimension mismatch");
  }
}

TensorModel TensorModel::scaling_only(ScalingModel scaling) {
  ReferenceTensor ref = scaling.reference;
  return TensorModel(ModelMode::ScalingOnly, std::move(ref), std::move(scaling), std::nullopt);
}

TensorModel TensorModel::rotation_only(ReferenceTensor reference, OrientationModel orientation) {
  return TensorModel(ModelMode::RotationOnly, std::move(reference), std::nullopt,
                     std::move(orientation));
}

TensorModel TensorModel::combined(ScalingModel scaling, OrientationModel orientation) {
  ReferenceTensor ref = scaling.reference;
  return TensorModel(ModelMode::Combined, std::move(ref), std::move(scaling),
                     std::move(orientation));
}

SymmetryClass TensorModel::realisation_class() const {
  return scaling_ ? scaling_->realisation_class : reference_.symmetry();
}

// --- samplers ---

DiagPos sample_scaling(const ScalingModel& m, Rng& rng) {
  const Vec mu = m.reference.spectrum().log_scaling();
  const int d = static_cast<int>(mu.size());
  const double sigma = m.log_sigma();
  Vec y(d);

  if (m.ordered) {
    const int big = mu(0) >= mu(1) ? 0 : 1;
    const int small = 1 - big;
    const double xi1 = mu(small) + sigma * standard_normal(rng);
    const double xi2 = std::log(mu(big) - mu(small)) + sigma * standard_normal(rng);
    y(small) = xi1;
    y(big) = xi1 + std::exp(xi2);
    return DiagPos(exp_each(y));
  }

  switch (m.realisation_class) {
    case SymmetryClass::Isotropic: {
      const double z = standard_normal(rng);
      for (int i = 0; i < d; ++i) y(i) = mu(i) + sigma * z;
      break;
    }
    case SymmetryClass::PlanIsotropic: {
      const auto [a, b] = isotropy_plane(m.reference.spectrum().scaling.values());
      const int c = 3 - a - b;
      const double z_plane = standard_normal(rng);
      const double z_axis = standard_normal(rng);
      y(a) = mu(a) + sigma * z_plane;
      y(b) = mu(b) + sigma * z_plane;
      y(c) = mu(c) + sigma * z_axis;
      break;
    }
    case SymmetryClass::Orthotropic:
      for (int i = 0; i < d; ++i) y(i) = mu(i) + sigma * standard_normal(rng);
      break;
  }
  return DiagPos(exp_each(y));
}

double sample_von_mises(double mean_angle, double eta, Rng& rng) {
  require(std::isfinite(eta) && eta > 0.0, "concentration must be positive");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double root = std::sqrt(1.0 + 4.0 * eta * eta);
  const double tau = 1.0 + root;
  // (tau - sqrt(2 tau)) / (2 eta) without cancellation for small eta.
  const double tau_minus_2 = 4.0 * eta * eta / (root + 1.0);
  const double rho = tau * tau_minus_2 / (2.0 * eta * (tau + std::sqrt(2.0 * tau)));
  const double r = (1.0 + rho * rho) / (2.0 * rho);

  double f = 1.0;
  for (;;) {
    const double z = std::cos(kPi * unif(rng));
    f = (1.0 + r * z) / (r + z);
    const double c = eta * (r - f);
    const double u2 = uniform_open0(rng);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) break;
  }
  const double theta = std::acos(std::clamp(f, -1.0, 1.0));
  const double signed_theta = unif(rng) < 0.5 ? -theta : theta;
  double phi = std::remainder(mean_angle + signed_theta, 2.0 * kPi);
  if (phi <= -kPi) phi += 2.0 * kPi;
  return phi;
}

Eigen::Vector3d sample_vmf(const Eigen::Vector3d& mu, double eta, Rng& rng) {
  require(std::isfinite(eta) && eta > 0.0, "concentration must be positive");
  require(std::abs(mu.norm() - 1.0) <= 1e-12, "mean direction must be a unit vector");
  const double u = uniform_open0(rng);
  // w = mu^T v has density proportional to exp(eta w) on [-1, 1].
  const double w =
      std::clamp(1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * eta)) / eta, -1.0, 1.0);
  const double psi = 2.0 * kPi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);

  Eigen::Index k = 0;
  mu.cwiseAbs().minCoeff(&k);
  const Eigen::Vector3d e1 = mu.cross(Eigen::Vector3d::Unit(k)).normalized();
  const Eigen::Vector3d e2 = mu.cross(e1);
  const double radial = std::sqrt(std::max(0.0, 1.0 - w * w));
  return (w * mu + radial * (std::cos(psi) * e1 + std::sin(psi) * e2)).normalized();
}

Rotation sample_rotation(const OrientationModel& m, Rng& rng) {
  if (m.dim == 2) {
    return rotation_2d(sample_von_mises(m.mean_angle, m.concentration, rng) - m.mean_angle);
  }
  const Eigen::Vector3d v = sample_vmf(m.mean_direction, m.concentration, rng);
  return rotation_between(m.mean_direction, v);
}

Spectrum sample_spectrum(const TensorModel& m, Rng& rng) {
  const Spectrum& ref = m.reference().spectrum();
  switch (m.mode()) {
    case ModelMode::ScalingOnly:
      return {ref.rotation, sample_scaling(*m.scaling(), rng)};
    case ModelMode::RotationOnly:
      return {sample_rotation(*m.orientation(), rng) * ref.rotation, ref.scaling};
    case ModelMode::Combined: {
      DiagPos scaling = sample_scaling(*m.scaling(), rng);
      return {sample_rotation(*m.orientation(), rng) * ref.rotation, std::move(scaling)};
    }
  }
  throw ValidationError("unknown model mode");
}

SpdMat sample_tensor(const TensorModel& m, Rng& rng) { return sample_spectrum(m, rng).reconstruct(); }

// --- von Mises moments ---

double von_mises_moment(double eta, int k) {
  require(std::isfinite(eta) && eta > 0.0, "concentration must be positive");
  using boost::math::quadrature::gauss_kronrod;
  // exp(eta (cos phi - 1)) < exp(-320) beyond 40 / sqrt(eta).
  const double upper = std::min(kPi, 40.0 / std::sqrt(eta));
  auto weight = [eta](double phi) { return std::exp(-2.0 * eta * std::pow(std::sin(0.5 * phi), 2)); };
  const double norm = gauss_kronrod<double, 61>::integrate(weight, 0.0, upper, 20, 1e-13);
  const double moment = gauss_kronrod<double, 61>::integrate(
      [&](double phi) { return std::cos(k * phi) * weight(phi); }, 0.0, upper, 20, 1e-13);
  return moment / norm;
}

double rho2_von_mises(double eta) { return von_mises_moment(eta, 2); }

SymMat distorted_euclid_mean_2d(const SymMat& h, double rho2) {
  require(h.dim() == 2, "the distortion closed form is two-dimensional");
  require(rho2 >= 0.0 && rho2 <= 1.0, "rho2 must lie in [0, 1]");
  const HydDevSplit split = hyd_dev_split(h);
  return split.hydrostatic + rho2 * split.deviatoric;
}

}  // namespace spdlab
