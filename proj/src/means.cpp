#include "spdlab/means.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <sstream>

namespace spdlab {

namespace {

std::string step_message(const char* what, int iters, double step) {
  std::ostringstream os;
  os << what << " did not converge after " << iters << " iterations (last step norm " << step
     << ")";
  return os.str();
}

/// Orthonormal basis of Sym(d) under the Frobenius inner product.
std::vector<Mat> sym_basis(int d) {
  std::vector<Mat> basis;
  for (int i = 0; i < d; ++i) {
    Mat e = Mat::Zero(d, d);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      Mat e = Mat::Zero(d, d);
      e(i, j) = e(j, i) = std::numbers::sqrt2 / 2.0;
      basis.push_back(e);
    }
  }
  return basis;
}

}  // namespace

void KarcherConfig::validate() const {
  require(max_iter > 0, "max_iter must be positive");
  require(tol > 0.0, "tol must be positive");
  require(damping > 0.0 && damping <= 1.0, "damping must lie in (0, 1]");
}

double frechet_variance(const SpdMat& b, const WeightedEnsemble<SpdMat>& ens, Metric metric,
                        ProductWeight c) {
  require(b.dim() == ens.dim(), "dimension mismatch");
  double psi = 0.0;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    const double dk = distance(metric, b, ens.point(k), c);
    psi += ens.weight(k) * dk * dk;
  }
  return psi;
}

SymMat mean_euclidean(const WeightedEnsemble<SpdMat>& ens) {
  const int d = ens.dim();
  Mat acc = Mat::Zero(d, d);
  for (std::size_t k = 0; k < ens.size(); ++k) acc += ens.weight(k) * ens.point(k).matrix();
  return SymMat(acc);
}

SpdMat mean_log_euclidean(const WeightedEnsemble<SpdMat>& ens) {
  const int d = ens.dim();
  Mat acc = Mat::Zero(d, d);
  for (std::size_t k = 0; k < ens.size(); ++k) acc += ens.weight(k) * spd_log(ens.point(k)).matrix();
  return spd_exp(SymMat(acc));
}

SpdMat mean_affine_invariant(const WeightedEnsemble<SpdMat>& ens, const KarcherConfig& cfg) {
  cfg.validate();
  const int d = ens.dim();
  SpdMat m = mean_log_euclidean(ens);
  double step = 0.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Mat half = spd_sqrt(m).matrix();
    const Mat inv_half = spd_inv_sqrt(m).matrix();
    Mat tangent = Mat::Zero(d, d);
    for (std::size_t k = 0; k < ens.size(); ++k) {
      const SpdMat whitened = ens.point(k).congruence(inv_half);
      tangent += ens.weight(k) * spd_log(whitened).matrix();
    }
    step = tangent.norm();
    m = spd_exp(SymMat(Mat(cfg.damping * tangent))).congruence(half);
    if (step < cfg.tol) return m;
  }
  throw NumericalError(step_message("affine-invariant Karcher mean", cfg.max_iter, step));
}

Rotation mean_rotation_karcher(const WeightedEnsemble<Rotation>& ens, const KarcherConfig& cfg) {
  cfg.validate();
  const int d = ens.dim();

  // Start from the chordal mean, the projection of the arithmetic mean onto SO(d).
  Mat chordal = Mat::Zero(d, d);
  for (std::size_t k = 0; k < ens.size(); ++k) chordal += ens.weight(k) * ens.point(k).matrix();
  Mat start = polar_orthogonal(chordal);
  Rotation q = start.determinant() > 0.0 ? Rotation(start) : ens.point(0);

  for (std::size_t k = 0; k < ens.size(); ++k) {
    if (rotation_angle(q.transpose() * ens.point(k)) >= 0.5 * std::numbers::pi) {
      throw ValidationError(
          "rotation ensemble too dispersed for a unique Karcher mean (a member lies pi/2 or "
          "more from the chordal mean)");
    }
  }

  double step = 0.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Rotation qt = q.transpose();
    Eigen::Vector3d tangent = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < ens.size(); ++k) {
      tangent += ens.weight(k) * rotation_log(qt * ens.point(k)).w.vector();
    }
    const EulerVector w = d == 2 ? EulerVector::planar(cfg.damping * tangent.z())
                                 : EulerVector::spatial(cfg.damping * tangent);
    step = skew_from_euler(w).frobenius_norm() / cfg.damping;
    q = q * rodrigues_exp(w);
    if (step < cfg.tol) return q;
  }
  throw NumericalError(step_message("rotation Karcher mean", cfg.max_iter, step));
}

Spectrum mean_scaling_rotation(const WeightedEnsemble<Spectrum>& ens, const Spectrum& reference,
                               const KarcherConfig& cfg, ProductWeight c) {
  require(reference.dim() == ens.dim(), "dimension mismatch");
  const int d = ens.dim();
  std::vector<Rotation> rotations;
  rotations.reserve(ens.size());
  // Averaging offsets from the reference keeps members equal to it exact.
  const Vec shift = reference.log_scaling();
  Vec log_mean = Vec::Zero(d);
  for (std::size_t k = 0; k < ens.size(); ++k) {
    const Spectrum aligned = closest_version(reference, ens.point(k), c).version;
    log_mean += ens.weight(k) * (aligned.log_scaling() - shift);
    rotations.push_back(aligned.rotation);
  }
  const Rotation q = mean_rotation_karcher(WeightedEnsemble<Rotation>(std::move(rotations), ens.weights()), cfg);
  return {q, DiagPos(exp_each(shift + log_mean))};
}

Spectrum mean_scaling_rotation(const WeightedEnsemble<Spectrum>& ens, const KarcherConfig& cfg,
                               ProductWeight c) {
  return mean_scaling_rotation(ens, ens.point(0), cfg, c);
}

Vec rotation_coordinates(const Rotation& r) {
  const EulerVector w = rotation_log(r).w;
  if (r.dim() == 2) return Vec::Constant(1, w.planar_angle());
  return w.vector();
}

ScalingRotationMean mean_scaling_rotation_with_se(const std::vector<Spectrum>& samples,
                                                  const Spectrum& reference,
                                                  const KarcherConfig& cfg, ProductWeight c) {
  require(samples.size() >= 2, "standard errors need at least two samples");
  const int d = reference.dim();
  const double n = static_cast<double>(samples.size());
  std::vector<Spectrum> aligned;
  aligned.reserve(samples.size());
  for (const Spectrum& s : samples) {
    require(s.dim() == d, "dimension mismatch");
    aligned.push_back(closest_version(reference, s, c).version);
  }
  const auto ens = WeightedEnsemble<Spectrum>::uniform(aligned);
  // Already aligned to the reference, so realignment inside the mean is a no-op.
  const Spectrum mean = mean_scaling_rotation(ens, reference, cfg, c);

  const Vec mean_log = mean.log_scaling();
  const int r_dim = d == 2 ? 1 : 3;
  Vec ss_log = Vec::Zero(d);
  Vec sum_rot = Vec::Zero(r_dim), ss_rot = Vec::Zero(r_dim);
  const Rotation qt = mean.rotation.transpose();
  std::vector<Vec> tangents;
  tangents.reserve(aligned.size());
  for (const Spectrum& s : aligned) {
    ss_log += (s.log_scaling() - mean_log).cwiseAbs2();
    tangents.push_back(rotation_coordinates(qt * s.rotation));
    sum_rot += tangents.back();
  }
  const Vec mean_rot = sum_rot / n;
  for (const Vec& t : tangents) ss_rot += (t - mean_rot).cwiseAbs2();
  const double scale = 1.0 / std::sqrt(n * (n - 1.0));
  return {mean, (ss_log.cwiseSqrt() * scale).eval(), (ss_rot.cwiseSqrt() * scale).eval()};
}

SpdMat frechet_minimize_generic(const WeightedEnsemble<SpdMat>& ens, Metric metric,
                                const SpdMat& init, const PatternSearchConfig& cfg,
                                ProductWeight c) {
  require(init.dim() == ens.dim(), "dimension mismatch");
  require(cfg.initial_step > 0.0 && cfg.min_step > 0.0, "pattern search steps must be positive");
  const std::vector<Mat> basis = sym_basis(init.dim());
  Mat h = spd_log(init).matrix();

  long evals = 0;
  auto psi = [&](const Mat& x) {
    ++evals;
    return frechet_variance(spd_exp(SymMat(x)), ens, metric, c);
  };

  double best = psi(h);
  double step = cfg.initial_step;
  while (step >= cfg.min_step) {
    bool improved = false;
    for (const Mat& e : basis) {
      for (double sign : {1.0, -1.0}) {
        const Mat trial = h + sign * step * e;
        const double val = psi(trial);
        if (val < best) {
          best = val;
          h = trial;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (evals > cfg.max_evaluations) {
      throw NumericalError(step_message("pattern search", static_cast<int>(evals), step));
    }
  }
  return spd_exp(SymMat(h));
}

}  // namespace spdlab
