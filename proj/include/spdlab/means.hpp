#pragma once

#include "spdlab/linalg.hpp"
#include "spdlab/metrics.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace spdlab {

/// Points with positive weights summing to one (to 1e-12).
template <class T>
class WeightedEnsemble {
 public:
  WeightedEnsemble(std::vector<T> points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    require(!points_.empty(), "ensemble must be nonempty");
    require(points_.size() == weights_.size(), "one weight per point required");
    // Neumaier summation so that N copies of 1/N pass the check for large N.
    double sum = 0.0, comp = 0.0;
    for (double w : weights_) {
      require(std::isfinite(w) && w > 0.0, "weights must be positive");
      const double t = sum + w;
      comp += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
      sum = t;
    }
    require(std::abs(sum + comp - 1.0) <= 1e-12, "weights must sum to one");
  }

  static WeightedEnsemble uniform(std::vector<T> points) {
    const std::size_t n = points.size();
    require(n > 0, "ensemble must be nonempty");
    return WeightedEnsemble(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const { return points_.size(); }
  const T& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<T>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  int dim() const { return points_.front().dim(); }

 private:
  std::vector<T> points_;
  std::vector<double> weights_;
};

struct KarcherConfig {
  int max_iter = 200;
  double tol = 1e-10;     ///< Frobenius norm of the tangent step
  double damping = 1.0;   ///< in (0, 1]

  void validate() const;
};

/// Psi(B) = sum_k w_k dist(B, C_k)^2.
double frechet_variance(const SpdMat& b, const WeightedEnsemble<SpdMat>& ens, Metric metric,
                        ProductWeight c = ProductWeight());

/// Weighted arithmetic mean; minimizes Psi under the Frobenius metric.
SymMat mean_euclidean(const WeightedEnsemble<SpdMat>& ens);

/// exp(sum_k w_k log C_k).
SpdMat mean_log_euclidean(const WeightedEnsemble<SpdMat>& ens);

/// Karcher mean under the affine-invariant metric,
/// M <- M^{1/2} exp(sum_k w_k log(M^{-1/2} C_k M^{-1/2})) M^{1/2},
/// started from the log-Euclidean mean.
SpdMat mean_affine_invariant(const WeightedEnsemble<SpdMat>& ens, const KarcherConfig& cfg = {});

/// Karcher mean on SO(d), Q <- Q exp(sum_k w_k log(Q^T Q_k)).
/// Requires every rotation within pi/2 of the chordal mean.
Rotation mean_rotation_karcher(const WeightedEnsemble<Rotation>& ens, const KarcherConfig& cfg = {});

/// Aligns every spectrum to `reference` (closest eigendecomposition version
/// in the product metric), then averages log-scalings arithmetically and
/// rotations with mean_rotation_karcher. The result does not depend on c
/// except through version alignment.
Spectrum mean_scaling_rotation(const WeightedEnsemble<Spectrum>& ens, const Spectrum& reference,
                               const KarcherConfig& cfg = {}, ProductWeight c = ProductWeight());

/// As above with the first ensemble member as alignment reference.
Spectrum mean_scaling_rotation(const WeightedEnsemble<Spectrum>& ens, const KarcherConfig& cfg = {},
                               ProductWeight c = ProductWeight());

/// Scaling-rotation mean of a uniformly weighted ensemble with Monte-Carlo
/// standard errors of its Lie coordinates: the aligned log-eigenvalues and the
/// tangent vectors log(Q_mean^T Q_k) (one component in 2D, three in 3D).
struct ScalingRotationMean {
  Spectrum mean;
  Vec log_scaling_se;
  Vec rotation_se;
};

ScalingRotationMean mean_scaling_rotation_with_se(const std::vector<Spectrum>& samples,
                                                  const Spectrum& reference,
                                                  const KarcherConfig& cfg = {},
                                                  ProductWeight c = ProductWeight());

/// Tangent coordinates of r: (phi) in 2D, the Euler vector in 3D.
Vec rotation_coordinates(const Rotation& r);

struct PatternSearchConfig {
  double initial_step = 0.25;
  double min_step = 1e-8;
  long max_evaluations = 2'000'000;
};

/// Derivative-free minimization of Psi by coordinate pattern search in the
/// log coordinates of B. Slow; intended as an independent cross-check of
/// the closed-form and fixed-point means.
SpdMat frechet_minimize_generic(const WeightedEnsemble<SpdMat>& ens, Metric metric,
                                const SpdMat& init, const PatternSearchConfig& cfg = {},
                                ProductWeight c = ProductWeight());

}  // namespace spdlab
