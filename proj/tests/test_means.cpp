#include "spdlab/batch.hpp"
#include "spdlab/means.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace spdlab;
using namespace spdlab::testing;

namespace {

Mat m2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

SpdMat diag2(double a, double b) { return SpdMat(m2(a, 0.0, 0.0, b)); }

std::vector<SpdMat> random_ensemble(int d, int n, Rng& rng, double log_sd = 0.5) {
  std::vector<SpdMat> pts;
  for (int i = 0; i < n; ++i) pts.push_back(random_spd(d, rng, log_sd));
  return pts;
}

WeightedEnsemble<SpdMat> random_weighted(int d, int n, Rng& rng, double log_sd = 0.5) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& x : w) sum += (x = uniform(rng, 0.2, 1.0));
  for (double& x : w) x /= sum;
  return {random_ensemble(d, n, rng, log_sd), w};
}

/// Relative log-perturbation exp(eps H / 2) B exp(eps H / 2) with |H|_F = 1.
SpdMat perturb(const SpdMat& b, Rng& rng, double eps) {
  const SymMat h = random_sym(b.dim(), rng);
  const Mat e = spd_exp((0.5 * eps / h.matrix().norm()) * h).matrix();
  return SpdMat(Mat(e * b.matrix() * e));
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("WeightedEnsemble validates weights") {
  const std::vector<SpdMat> pts{SpdMat::identity(2), SpdMat::identity(2)};
  CHECK_THROWS_AS(WeightedEnsemble<SpdMat>(pts, {0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(WeightedEnsemble<SpdMat>(pts, {1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(WeightedEnsemble<SpdMat>(pts, {1.0}), ValidationError);
  CHECK_THROWS_AS(WeightedEnsemble<SpdMat>::uniform({}), ValidationError);
  CHECK_NOTHROW(WeightedEnsemble<SpdMat>::uniform(std::vector<SpdMat>(1'000'000, SpdMat::identity(2))));
}

TEST_CASE("frechet_variance examples") {
  const SpdMat b(m2(2.0, 0.3, 0.3, 1.0));
  const auto single = WeightedEnsemble<SpdMat>::uniform({b});
  for (Metric m : {Metric::Frobenius, Metric::AffineInvariant, Metric::LogEuclidean,
                   Metric::ScalingRotation}) {
    CHECK(frechet_variance(b, single, m) < 1e-14);
  }
  const SpdMat c1 = diag2(1.0, 4.0), c2(m2(3.0, 1.0, 1.0, 2.0));
  const auto pair = WeightedEnsemble<SpdMat>::uniform({c1, c2});
  const SpdMat mid = spd_exp(0.5 * (spd_log(c1) + spd_log(c2)));
  const double dl = dist_log_euclidean(c1, c2);
  // each point sits at half the distance: 2 * (1/2) * (dl/2)^2
  CHECK(frechet_variance(mid, pair, Metric::LogEuclidean) ==
        doctest::Approx(dl * dl / 4).epsilon(1e-12));
}

TEST_CASE("mean_euclidean") {
  const SpdMat c(m2(2.0, 0.3, 0.3, 1.0));
  CHECK(rel(mean_euclidean(WeightedEnsemble<SpdMat>::uniform({c})).matrix(), c.matrix()) == 0.0);
  const auto e = WeightedEnsemble<SpdMat>::uniform({SpdMat::identity(2), SpdMat::identity(2).scaled(3.0)});
  CHECK(rel(mean_euclidean(e).matrix(), 2.0 * Mat::Identity(2, 2)) < 1e-15);
}

TEST_CASE("mean_log_euclidean") {
  const SpdMat c(m2(2.0, 0.3, 0.3, 1.0));
  CHECK(rel(mean_log_euclidean(WeightedEnsemble<SpdMat>::uniform({c, c.inverse()})).matrix(),
            Mat::Identity(2, 2)) < 1e-14);
  CHECK(rel(mean_log_euclidean(WeightedEnsemble<SpdMat>::uniform({diag2(1.0, 4.0), diag2(4.0, 1.0)}))
                .matrix(),
            2.0 * Mat::Identity(2, 2)) < 1e-14);
  Rng rng(127);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 2;
    const SpdMat a = random_spd(d, rng), b = random_spd(d, rng);
    const SpdMat m = mean_log_euclidean(WeightedEnsemble<SpdMat>::uniform({a, b}));
    CHECK(m.determinant() == doctest::Approx(std::sqrt(a.determinant() * b.determinant())).epsilon(1e-10));
  }
}

TEST_CASE("mean_affine_invariant") {
  const SpdMat c(m2(2.0, 0.3, 0.3, 1.0));
  CHECK(rel(mean_affine_invariant(WeightedEnsemble<SpdMat>::uniform({c})).matrix(), c.matrix()) <
        1e-14);
  CHECK(rel(mean_affine_invariant(WeightedEnsemble<SpdMat>::uniform({c, c.inverse()})).matrix(),
            Mat::Identity(2, 2)) < 1e-12);
  Rng rng(131);
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 2;
    const Mat q = random_rotation(d, rng).matrix();
    std::vector<SpdMat> pts;
    for (int i = 0; i < 5; ++i) {
      const Vec y = random_vec(d, rng);
      pts.emplace_back(Mat(q * y.array().exp().matrix().asDiagonal() * q.transpose()));
    }
    const auto e = WeightedEnsemble<SpdMat>::uniform(pts);
    CHECK(rel(mean_affine_invariant(e).matrix(), mean_log_euclidean(e).matrix()) < 1e-8);
  }
}

TEST_CASE("mean_affine_invariant reports non-convergence") {
  Rng rng(137);
  const auto e = WeightedEnsemble<SpdMat>::uniform(random_ensemble(3, 6, rng, 1.5));
  KarcherConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-14;
  CHECK_THROWS_AS(mean_affine_invariant(e, cfg), NumericalError);
  cfg.tol = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("affine-invariant mean satisfies the first-order condition") {
  Rng rng(139);
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 2;
    const auto e = random_weighted(d, 6, rng, 0.8);
    const SpdMat m = mean_affine_invariant(e);
    const Mat is = spd_inv_sqrt(m).matrix();
    Mat grad = Mat::Zero(d, d);
    for (std::size_t i = 0; i < e.size(); ++i) {
      grad += e.weight(i) * spd_log(SpdMat(Mat(is * e.point(i).matrix() * is))).matrix();
    }
    CHECK(grad.norm() < 1e-9);
  }
}

TEST_CASE("means are local minimizers of the Frechet variance") {
  Rng rng(149);
  for (int k = 0; k < 6; ++k) {
    const int d = 2 + k % 2;
    const auto e = random_weighted(d, 5, rng);
    const struct {
      Metric metric;
      SpdMat mean;
    } cases[] = {{Metric::Frobenius, SpdMat(mean_euclidean(e))},
                 {Metric::LogEuclidean, mean_log_euclidean(e)},
                 {Metric::AffineInvariant, mean_affine_invariant(e)}};
    for (const auto& c : cases) {
      const double psi = frechet_variance(c.mean, e, c.metric);
      for (int p = 0; p < 100; ++p) {
        CHECK(psi <= frechet_variance(perturb(c.mean, rng, 1e-2), e, c.metric) + 1e-14);
      }
    }
  }
}

TEST_CASE("mean equivariance") {
  Rng rng(151);
  for (int k = 0; k < 30; ++k) {
    const int d = 2 + k % 2;
    const auto e = random_weighted(d, 5, rng);
    const double alpha = std::exp(uniform(rng, -2.0, 2.0));
    const Mat r = random_rotation(d, rng).matrix();
    std::vector<SpdMat> scaled, rotated, inverted;
    for (const SpdMat& p : e.points()) {
      scaled.push_back(p.scaled(alpha));
      rotated.push_back(p.congruence(r.transpose()));
      inverted.push_back(p.inverse());
    }
    const WeightedEnsemble<SpdMat> es(scaled, e.weights()), er(rotated, e.weights()),
        ei(inverted, e.weights());
    for (auto mean : {+[](const WeightedEnsemble<SpdMat>& x) { return mean_log_euclidean(x); },
                      +[](const WeightedEnsemble<SpdMat>& x) { return mean_affine_invariant(x); }}) {
      const SpdMat m = mean(e);
      CHECK(rel(mean(es).matrix(), m.scaled(alpha).matrix()) < 1e-8);
      CHECK(rel(mean(er).matrix(), m.congruence(r.transpose()).matrix()) < 1e-8);
      CHECK(rel(mean(ei).matrix(), m.inverse().matrix()) < 1e-8);
    }
  }
}

TEST_CASE("swelling witness") {
  const SpdMat a = diag2(2.0, 0.5);
  const SpdMat b = a.congruence(rotation_2d(kPi / 2).matrix());
  const auto e = WeightedEnsemble<SpdMat>::uniform({a, b});
  const double de = mean_euclidean(e).matrix().determinant();
  CHECK(de > a.determinant());
  CHECK(de > b.determinant());
  CHECK(mean_log_euclidean(e).determinant() ==
        doctest::Approx(std::sqrt(a.determinant() * b.determinant())).epsilon(1e-14));
}

TEST_CASE("mean_rotation_karcher") {
  Rng rng(157);
  const Rotation q = random_rotation(3, rng);
  CHECK((mean_rotation_karcher(WeightedEnsemble<Rotation>::uniform({q})).matrix() - q.matrix())
            .norm() < 1e-14);
  for (double phi : {0.1, 0.7, 1.5}) {
    const auto e = WeightedEnsemble<Rotation>::uniform({rotation_2d(phi), rotation_2d(-phi)});
    CHECK((mean_rotation_karcher(e).matrix() - Mat::Identity(2, 2)).norm() < 1e-12);
  }
  // 3D: symmetric pairs about a random centre
  for (int k = 0; k < 30; ++k) {
    const Rotation centre = random_rotation(3, rng);
    const EulerVector w = random_euler(3, rng, 1.2);
    const EulerVector minus = EulerVector::spatial(-w.vector());
    const auto e = WeightedEnsemble<Rotation>::uniform(
        {centre * rodrigues_exp(w), centre * rodrigues_exp(minus)});
    CHECK((mean_rotation_karcher(e).matrix() - centre.matrix()).norm() < 1e-10);
  }
  const auto fine = WeightedEnsemble<Rotation>::uniform({rotation_2d(0.0), rotation_2d(3.0)});
  CHECK((mean_rotation_karcher(fine).matrix() - rotation_2d(1.5).matrix()).norm() < 1e-12);
  const auto spread = WeightedEnsemble<Rotation>::uniform(
      {rotation_2d(0.0), rotation_2d(2 * kPi / 3), rotation_2d(4 * kPi / 3)});
  CHECK_THROWS_AS(mean_rotation_karcher(spread), ValidationError);
  const auto wide = WeightedEnsemble<Rotation>::uniform(
      {rotation_2d(0.0), rotation_2d(0.0), rotation_2d(2.5)});
  CHECK_THROWS_AS(mean_rotation_karcher(wide), ValidationError);
}

TEST_CASE("Karcher mean of concentrated von Mises rotations is the identity") {
  const std::size_t n = 100'000;
  const TensorModel model = TensorModel::rotation_only(
      ReferenceTensor(spd_spectrum(diag2(1.0, 0.54)), SymmetryClass::Orthotropic),
      OrientationModel::planar(0.0, 75.0));
  std::vector<Rotation> rs;
  rs.reserve(n);
  for (const Spectrum& s : sample_spectra(model, 2024, n, 1)) {
    rs.push_back(s.rotation);
  }
  const Rotation m = mean_rotation_karcher(WeightedEnsemble<Rotation>::uniform(rs));
  ScalarAccumulator acc;
  for (const Rotation& r : rs) acc.add(rotation_coordinates(r)(0));
  CHECK(std::abs(rotation_coordinates(m)(0)) <= 3.0 * acc.standard_error());
}

TEST_CASE("mean_scaling_rotation") {
  Rng rng(163);
  const Spectrum s = spd_spectrum(SpdMat(m2(2.0, 0.3, 0.3, 1.0)));
  const Spectrum single = mean_scaling_rotation(WeightedEnsemble<Spectrum>::uniform({s}));
  CHECK((single.reconstruct().matrix() - s.reconstruct().matrix()).norm() < 1e-14);

  // Members given in other eigendecomposition versions align before averaging.
  const Rotation flipped(Mat(s.rotation.matrix() * Mat(Vec::Constant(2, -1.0).asDiagonal())));
  const Spectrum s_flip{flipped, s.scaling};
  const Spectrum twin = mean_scaling_rotation(WeightedEnsemble<Spectrum>::uniform({s, s_flip}));
  CHECK((twin.reconstruct().matrix() - s.reconstruct().matrix()).norm() < 1e-13);

  // c enters only through alignment, so well-aligned ensembles ignore it.
  std::vector<Spectrum> pts;
  for (int i = 0; i < 20; ++i) {
    const Vec y = s.log_scaling() + random_vec(2, rng, 0.1);
    pts.push_back({s.rotation * rotation_2d(normal(rng, 0.1)), DiagPos(y.array().exp().matrix())});
  }
  const auto e = WeightedEnsemble<Spectrum>::uniform(pts);
  const Mat base = mean_scaling_rotation(e, s).reconstruct().matrix();
  for (double c : {0.01, 0.5, 10.0}) {
    CHECK((mean_scaling_rotation(e, s, KarcherConfig{}, ProductWeight(c)).reconstruct().matrix() -
           base)
              .norm() < 1e-13);
  }
}

TEST_CASE("scaling mean of lognormal draws recovers the reference") {
  ScalingModel sm{ReferenceTensor(spd_spectrum(SpdMat::identity(2).scaled(0.54)),
                                  SymmetryClass::Isotropic),
                  SymmetryClass::Orthotropic, 0.1, Coupling::Independent};
  const TensorModel model = TensorModel::scaling_only(sm);
  const std::vector<Spectrum> draws = sample_spectra(model, 17, 20'000, 1);
  const ScalingRotationMean m =
      mean_scaling_rotation_with_se(draws, model.reference().spectrum());
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(m.mean.log_scaling()(i) - std::log(0.54)) <= 3.0 * m.log_scaling_se(i));
  }
}

TEST_CASE("generic minimizer agrees with closed forms") {
  Rng rng(167);
  PatternSearchConfig ps;
  for (int k = 0; k < 4; ++k) {
    const int d = 2 + k % 2;
    const auto e = random_weighted(d, 4, rng);
    const SpdMat start = SpdMat::identity(d);
    const SpdMat fro = SpdMat(mean_euclidean(e));
    CHECK(std::abs(frechet_variance(frechet_minimize_generic(e, Metric::Frobenius, start, ps), e,
                                    Metric::Frobenius) -
                   frechet_variance(fro, e, Metric::Frobenius)) < 1e-5);
    const SpdMat le = mean_log_euclidean(e);
    CHECK(std::abs(frechet_variance(frechet_minimize_generic(e, Metric::LogEuclidean, start, ps), e,
                                    Metric::LogEuclidean) -
                   frechet_variance(le, e, Metric::LogEuclidean)) < 1e-5);
  }
  const auto [a, b] = random_commuting_pair(2, rng);
  const auto pair = WeightedEnsemble<SpdMat>::uniform({a, b});
  const SpdMat mid = spd_exp(0.5 * (spd_log(a) + spd_log(b)));
  const SpdMat g = frechet_minimize_generic(pair, Metric::AffineInvariant, SpdMat::identity(2), ps);
  CHECK(std::abs(frechet_variance(g, pair, Metric::AffineInvariant) -
                 frechet_variance(mid, pair, Metric::AffineInvariant)) < 1e-5);
}
