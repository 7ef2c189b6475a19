#include "spdlab/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace spdlab {

namespace {

constexpr double kTieTol = 1e-8;

using Block = std::vector<int>;

/// Groups of indices whose eigenvalues agree to relative kTieTol.
std::vector<Block> tied_blocks(const Vec& lambda) {
  const int d = static_cast<int>(lambda.size());
  const double scale = lambda.cwiseAbs().maxCoeff();
  std::vector<Block> blocks;
  std::vector<bool> used(d, false);
  for (int i = 0; i < d; ++i) {
    if (used[i]) continue;
    Block b{i};
    used[i] = true;
    for (int j = i + 1; j < d; ++j) {
      if (!used[j] && std::abs(lambda(i) - lambda(j)) <= kTieTol * scale) {
        b.push_back(j);
        used[j] = true;
      }
    }
    if (b.size() > 1) blocks.push_back(std::move(b));
  }
  return blocks;
}

/// Special orthogonal G maximizing tr(A G), i.e. minimizing ||A G - I||_F.
Mat kabsch(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat v = svd.matrixV();
  const Mat u = svd.matrixU();
  Vec s = Vec::Ones(a.rows());
  if ((v * u.transpose()).determinant() < 0.0) s(a.rows() - 1) = -1.0;
  return v * s.asDiagonal() * u.transpose();
}

/// Rotates the columns of `q` inside each tied block so that target^T q is
/// as close to the identity as possible on that block.
void align_blocks(const Mat& target, Mat& q, const std::vector<Block>& blocks) {
  for (const Block& b : blocks) {
    const int n = static_cast<int>(b.size());
    Mat mbb(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) mbb(i, j) = target.col(b[i]).dot(q.col(b[j]));
    }
    const Mat g = kabsch(mbb);
    Mat cols(q.rows(), n);
    for (int j = 0; j < n; ++j) cols.col(j) = q.col(b[j]);
    const Mat rotated = cols * g;
    for (int j = 0; j < n; ++j) q.col(b[j]) = rotated.col(j);
  }
}

double product_sq(const Vec& y1, const Mat& q1, const Vec& y2, const Mat& q2, double c) {
  const Rotation rel(Mat(q1.transpose() * q2));
  const double rot = skew_from_euler(rotation_log(rel).w).frobenius_norm();
  return (y1 - y2).squaredNorm() + c * rot * rot;
}

struct Version {
  Vec lambda;
  Mat q;
};

/// All signed-permutation versions of (lambda, q) with det +1, identity first.
std::vector<Version> versions(const Vec& lambda, const Mat& q) {
  const int d = static_cast<int>(lambda.size());
  std::vector<Version> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    Mat p = Mat::Zero(d, d);
    for (int k = 0; k < d; ++k) p(perm[k], k) = 1.0;
    const double perm_sign = p.determinant();
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec signs(d);
      double sign_prod = 1.0;
      for (int k = 0; k < d; ++k) {
        signs(k) = (mask >> k) & 1 ? -1.0 : 1.0;
        sign_prod *= signs(k);
      }
      if (perm_sign * sign_prod < 0.0) continue;
      Version v{Vec(d), Mat(d, d)};
      for (int k = 0; k < d; ++k) {
        v.lambda(k) = lambda(perm[k]);
        v.q.col(k) = signs(k) * q.col(perm[k]);
      }
      out.push_back(std::move(v));
    }
  } while (std::next_permutation(perm.begin(), perm.begin() + d));
  return out;
}

}  // namespace

Metric parse_metric(std::string_view name) {
  if (name == "frobenius" || name == "F") return Metric::Frobenius;
  if (name == "affine" || name == "G") return Metric::AffineInvariant;
  if (name == "logeuclid" || name == "L") return Metric::LogEuclidean;
  if (name == "scaling" || name == "S") return Metric::ScalingRotation;
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::Frobenius: return "frobenius";
    case Metric::AffineInvariant: return "affine";
    case Metric::LogEuclidean: return "logeuclid";
    case Metric::ScalingRotation: return "scaling";
  }
  return "unknown";
}

ProductWeight::ProductWeight(double c) : c_(c) {
  require(std::isfinite(c) && c > 0.0, "product weight c must be positive");
}

double dist_frobenius(const SymMat& c1, const SymMat& c2) {
  require(c1.dim() == c2.dim(), "dimension mismatch");
  return (c1.matrix() - c2.matrix()).norm();
}

double dist_affine_invariant(const SpdMat& c1, const SpdMat& c2) {
  require(c1.dim() == c2.dim(), "dimension mismatch");
  const Mat a = spd_inv_sqrt(c1).matrix();
  Mat s = a * c2.matrix() * a;
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().matrix().norm();
}

double dist_affine_invariant_factored(const Vec& y1, const Rotation& q1, const Vec& y2,
                                      const Rotation& q2) {
  require(y1.size() == y2.size() && q1.dim() == q2.dim() && q1.dim() == y1.size(),
          "dimension mismatch");
  const Vec half_inv = (-0.5 * y1).array().exp().matrix();
  const Mat rel = q1.matrix().transpose() * q2.matrix();
  Mat s = half_inv.asDiagonal() * rel * y2.array().exp().matrix().asDiagonal() * rel.transpose() *
          half_inv.asDiagonal();
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().matrix().norm();
}

double dist_log_euclidean(const SpdMat& c1, const SpdMat& c2) {
  require(c1.dim() == c2.dim(), "dimension mismatch");
  return dist_frobenius(spd_log(c1), spd_log(c2));
}

double dist_rotation(const Rotation& q1, const Rotation& q2) {
  require(q1.dim() == q2.dim(), "dimension mismatch");
  return skew_from_euler(rotation_log(q1.transpose() * q2).w).frobenius_norm();
}

double dist_product(const Spectrum& s1, const Spectrum& s2, ProductWeight c) {
  require(s1.dim() == s2.dim(), "dimension mismatch");
  const double dr = dist_rotation(s1.rotation, s2.rotation);
  return std::sqrt((s1.log_scaling() - s2.log_scaling()).squaredNorm() + c.value() * dr * dr);
}

VersionMatch closest_version(const Spectrum& target, const Spectrum& s, ProductWeight c) {
  require(target.dim() == s.dim(), "dimension mismatch");
  const Vec y1 = target.log_scaling();
  const Mat& q1 = target.rotation.matrix();
  double best = 0.0;
  bool found = false;
  Version best_v{};
  for (Version& v : versions(s.scaling.values(), s.rotation.matrix())) {
    align_blocks(q1, v.q, tied_blocks(v.lambda));
    const double d2 = product_sq(y1, q1, log_each(v.lambda), v.q, c.value());
    // Strict improvement beyond roundoff keeps the earliest version on ties.
    if (!found || d2 < best - 1e-14 * std::max(1.0, best)) {
      found = true;
      best = d2;
      best_v = std::move(v);
    }
  }
  return {Spectrum{Rotation(best_v.q), DiagPos(best_v.lambda)}, std::sqrt(best)};
}

double dist_scaling_rotation(const SpdMat& c1, const SpdMat& c2, ProductWeight c) {
  require(c1.dim() == c2.dim(), "dimension mismatch");
  const Spectrum s1 = spd_spectrum(c1);
  const Spectrum s2 = spd_spectrum(c2);
  const Vec y1 = s1.log_scaling();
  const std::vector<Block> blocks1 = tied_blocks(s1.scaling.values());

  double best = std::numeric_limits<double>::infinity();
  for (Version& v : versions(s2.scaling.values(), s2.rotation.matrix())) {
    const std::vector<Block> blocks2 = tied_blocks(v.lambda);
    Mat q1 = s1.rotation.matrix();
    // Alternate block alignment on both sides; each pass cannot increase the
    // rotation term.
    for (int pass = 0; pass < 3; ++pass) {
      align_blocks(q1, v.q, blocks2);
      align_blocks(v.q, q1, blocks1);
    }
    best = std::min(best, product_sq(y1, q1, log_each(v.lambda), v.q, c.value()));
  }
  return std::sqrt(best);
}

SpdMat boxtimes(const SpdMat& c1, const SpdMat& c2) {
  return spd_exp(spd_log(c1) + spd_log(c2));
}

double distance(Metric m, const SpdMat& c1, const SpdMat& c2, ProductWeight c) {
  // Identical inputs are exactly zero apart; the pencil route leaves rounding residue.
  if (c1.dim() == c2.dim() && c1.matrix() == c2.matrix()) return 0.0;
  switch (m) {
    case Metric::Frobenius: return dist_frobenius(c1.sym(), c2.sym());
    case Metric::AffineInvariant: return dist_affine_invariant(c1, c2);
    case Metric::LogEuclidean: return dist_log_euclidean(c1, c2);
    case Metric::ScalingRotation: return dist_scaling_rotation(c1, c2, c);
  }
  throw ValidationError("unknown metric selector");
}

}  // namespace spdlab
