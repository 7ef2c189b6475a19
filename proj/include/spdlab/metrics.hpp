#pragma once

#include "spdlab/linalg.hpp"

#include <string>
#include <string_view>

namespace spdlab {

enum class Metric { Frobenius, AffineInvariant, LogEuclidean, ScalingRotation };

/// Accepts "frobenius", "affine", "logeuclid", "scaling" (and the letters F, G, L, S).
Metric parse_metric(std::string_view name);
std::string metric_name(Metric m);

/// Weight c > 0 of the rotation term in the product metric.
class ProductWeight {
 public:
  explicit ProductWeight(double c = 1.0);
  double value() const { return c_; }

 private:
  double c_;
};

/// ||C1 - C2||_F.
double dist_frobenius(const SymMat& c1, const SymMat& c2);

/// ||log(C1^{-1/2} C2 C1^{-1/2})||_F.
double dist_affine_invariant(const SpdMat& c1, const SpdMat& c2);

/// Affine-invariant distance evaluated from log-spectral factors
/// (Y = log Lambda as vectors, Q eigenvector rotations).
double dist_affine_invariant_factored(const Vec& y1, const Rotation& q1, const Vec& y2,
                                      const Rotation& q2);

/// ||log C1 - log C2||_F.
double dist_log_euclidean(const SpdMat& c1, const SpdMat& c2);

/// ||log(Q1^T Q2)||_F (bi-invariant geodesic distance on SO(d)).
double dist_rotation(const Rotation& q1, const Rotation& q2);

/// sqrt(||log L1 - log L2||^2 + c ||log(Q1^T Q2)||_F^2) on Diag+(d) x SO(d).
double dist_product(const Spectrum& s1, const Spectrum& s2, ProductWeight c = ProductWeight());

/// Result of matching one spectrum against another over eigendecomposition
/// versions.
struct VersionMatch {
  Spectrum version;  ///< the chosen (Lambda, Q) factorization of the second argument
  double distance;   ///< product distance to the first argument
};

/// Chooses the eigendecomposition version of `s` (signed permutations with
/// det +1, plus basis alignment inside tied eigenvalue blocks) closest to
/// `target` in the product metric. Ties keep the earliest version, the
/// identity version first.
VersionMatch closest_version(const Spectrum& target, const Spectrum& s,
                             ProductWeight c = ProductWeight());

/// Scaling-rotation distance: minimum product distance over all
/// eigendecomposition versions of both arguments.
double dist_scaling_rotation(const SpdMat& c1, const SpdMat& c2, ProductWeight c = ProductWeight());

/// Commutative product exp(log C1 + log C2).
SpdMat boxtimes(const SpdMat& c1, const SpdMat& c2);

/// Dispatch on a metric selector. For Frobenius the SPD arguments are
/// treated as elements of Sym(d).
double distance(Metric m, const SpdMat& c1, const SpdMat& c2, ProductWeight c = ProductWeight());

}  // namespace spdlab
