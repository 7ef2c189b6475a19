#include "spdlab/linalg.hpp"
#include "support.hpp"

#include <doctest.h>

#include <limits>

using namespace spdlab;
using namespace spdlab::testing;

namespace {

Mat m2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

}  // namespace

TEST_CASE("SymMat symmetrizes and rejects asymmetric input") {
  const SymMat s(m2(1.0, 2.0 + 1e-12, 2.0, 3.0));
  CHECK(s(0, 1) == s(1, 0));
  CHECK_THROWS_AS(SymMat(m2(1.0, 2.0, 2.1, 3.0)), ValidationError);
  CHECK_THROWS_AS(SymMat(Mat::Identity(1, 1)), ValidationError);
}

TEST_CASE("SpdMat rejects indefinite and near-singular matrices") {
  CHECK_THROWS_AS(SpdMat(m2(1.0, 0.0, 0.0, -1.0)), ValidationError);
  CHECK_THROWS_AS(SpdMat(m2(1.0, 0.0, 0.0, 1e-13)), ValidationError);
  CHECK_NOTHROW(SpdMat(m2(1.0, 0.0, 0.0, 1e-11)));
  CHECK_THROWS_AS(SpdMat(Mat::Zero(2, 2)), ValidationError);
}

TEST_CASE("DiagPos requires positive entries") {
  CHECK_THROWS_AS(DiagPos(Vec::Constant(2, 0.0)), ValidationError);
  CHECK(DiagPos(Vec::Constant(3, 2.0)).values().sum() == doctest::Approx(6.0));
}

TEST_CASE("sym_eig examples") {
  SUBCASE("diagonal, already descending") {
    const EigenDecomposition e = sym_eig(SymMat(m2(2.0, 0.0, 0.0, 1.0)));
    CHECK(e.values(0) == doctest::Approx(2.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    CHECK(rel(e.vectors.matrix(), Mat::Identity(2, 2)) < 1e-14);
  }
  SUBCASE("swap matrix") {
    const EigenDecomposition e = sym_eig(SymMat(m2(0.0, 1.0, 1.0, 0.0)));
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(-1.0));
    const Mat& q = e.vectors.matrix();
    CHECK(std::abs(std::abs(q(0, 0)) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(q(0, 0) - q(1, 0)) < 1e-12);  // first column along (1, 1)
    CHECK(rel(e.reconstruct(), m2(0.0, 1.0, 1.0, 0.0)) < 1e-12);
  }
  SUBCASE("scalar matrix gives the identity basis") {
    const EigenDecomposition e = sym_eig(SymMat::identity(3));
    CHECK(rel(e.vectors.matrix(), Mat::Identity(3, 3)) == 0.0);
    CHECK((e.values.array() == 1.0).all());
  }
}

TEST_CASE("sym_eig reconstruction and ordering on random matrices") {
  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const int d = 2 + k % 2;
    const SymMat s = random_sym(d, rng);
    const EigenDecomposition e = sym_eig(s);
    CHECK(e.vectors.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < d; ++i) CHECK(e.values(i - 1) >= e.values(i));
    CHECK(rel(e.reconstruct(), s.matrix()) < 1e-10);
  }
}

TEST_CASE("spd_exp examples") {
  CHECK(rel(spd_exp(SymMat::zero(2)).matrix(), Mat::Identity(2, 2)) == 0.0);
  Vec y(2);
  y << std::log(2.0), std::log(3.0);
  CHECK(rel(spd_exp(SymMat::diagonal(y)).matrix(), m2(2.0, 0.0, 0.0, 3.0)) < 1e-15);

  const Mat q = rotation_2d(kPi / 6).matrix();
  const Mat h = q * m2(1.0, 0.0, 0.0, -1.0) * q.transpose();
  const Mat expected = q * m2(std::exp(1.0), 0.0, 0.0, std::exp(-1.0)) * q.transpose();
  const Mat got = spd_exp(SymMat(h)).matrix();
  CHECK(rel(got, expected) < 1e-14);
  CHECK(rel(got, expm_series(h)) < 1e-14);
}

TEST_CASE("spd_exp matches the series oracle on random input and reports overflow") {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const SymMat h = random_sym(2 + k % 2, rng, 2.0);
    CHECK(rel(spd_exp(h).matrix(), expm_series(h.matrix())) < 1e-12);
  }
  CHECK_THROWS_AS(spd_exp(SymMat(m2(701.0, 0.0, 0.0, 0.0))), NumericalError);
}

TEST_CASE("spd_log examples and round trips") {
  CHECK(spd_log(SpdMat::identity(2)).matrix().norm() == 0.0);
  const SymMat l = spd_log(SpdMat(m2(std::exp(2.0), 0.0, 0.0, 1.0)));
  CHECK(rel(l.matrix(), m2(2.0, 0.0, 0.0, 0.0)) < 1e-15);

  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const int d = 2 + k % 2;
    const SpdMat c = random_spd(d, rng);
    CHECK(rel(spd_exp(spd_log(c)).matrix(), c.matrix()) < 1e-9);
  }
}

TEST_CASE("log inverts exp for eigenvalues in [-20, 20]") {
  Rng rng(7);
  SUBCASE("eigenbasis aligned with the axes: full range") {
    for (int k = 0; k < 500; ++k) {
      const int d = 2 + k % 2;
      Vec y(d);
      for (int i = 0; i < d; ++i) y(i) = uniform(rng, -20.0, 20.0);
      // Keep the spread inside the SPD floor lambda_min > 1e-12 lambda_max.
      if (y.maxCoeff() - y.minCoeff() > 27.0) continue;
      const SymMat h = SymMat::diagonal(y);
      CHECK((spd_log(spd_exp(h)).matrix() - h.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
  SUBCASE("random frames: any location, spread up to 10") {
    // A dense Q diag(e^y) Q^T carries the small eigenvalues only to
    // eps * exp(spread) relative accuracy.
    for (int k = 0; k < 500; ++k) {
      const int d = 2 + k % 2;
      const Mat q = random_rotation(d, rng).matrix();
      const double centre = uniform(rng, -15.0, 15.0);
      Vec y(d);
      for (int i = 0; i < d; ++i) y(i) = centre + uniform(rng, -5.0, 5.0);
      const SymMat h(Mat(q * y.asDiagonal() * q.transpose()));
      CHECK((spd_log(spd_exp(h)).matrix() - h.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("log commutes with conjugation by rotations") {
  Rng rng(9);
  for (int k = 0; k < 300; ++k) {
    const int d = 2 + k % 2;
    const SpdMat c = random_spd(d, rng);
    const Mat r = random_rotation(d, rng).matrix();
    const Mat lhs = spd_log(c.congruence(r)).matrix();
    const Mat rhs = r * spd_log(c).matrix() * r.transpose();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("spd_sqrt and its inverse") {
  CHECK(rel(spd_sqrt(SpdMat::identity(3)).matrix(), Mat::Identity(3, 3)) == 0.0);
  CHECK(rel(spd_sqrt(SpdMat(m2(4.0, 0.0, 0.0, 9.0))).matrix(), m2(2.0, 0.0, 0.0, 3.0)) < 1e-15);
  Rng rng(13);
  for (int k = 0; k < 500; ++k) {
    const SpdMat c = random_spd(2 + k % 2, rng);
    const Mat s = spd_sqrt(c).matrix();
    CHECK(rel(s * s, c.matrix()) < 1e-10);
    CHECK(rel(spd_inv_sqrt(c).matrix() * s, Mat::Identity(c.dim(), c.dim())) < 1e-10);
  }
}

TEST_CASE("hydrostatic/deviatoric split") {
  SUBCASE("unit corner") {
    const HydDevSplit s = hyd_dev_split(SymMat(m2(1.0, 0.0, 0.0, 0.0)));
    CHECK(rel(s.hydrostatic.matrix(), 0.5 * Mat::Identity(2, 2)) == 0.0);
    CHECK(rel(s.deviatoric.matrix(), m2(0.5, 0.0, 0.0, -0.5)) == 0.0);
  }
  SUBCASE("scalar") {
    const HydDevSplit s = hyd_dev_split(3.5 * SymMat::identity(3));
    CHECK(rel(s.hydrostatic.matrix(), 3.5 * Mat::Identity(3, 3)) < 1e-15);
    CHECK(s.deviatoric.matrix().norm() < 1e-15);
  }
  SUBCASE("off-diagonal") {
    const HydDevSplit s = hyd_dev_split(SymMat(m2(2.0, 1.0, 1.0, 0.0)));
    CHECK(rel(s.hydrostatic.matrix(), Mat::Identity(2, 2)) == 0.0);
    CHECK(rel(s.deviatoric.matrix(), m2(1.0, 1.0, 1.0, -1.0)) == 0.0);
  }
  SUBCASE("random: exact sum, trace-free deviator") {
    Rng rng(17);
    for (int k = 0; k < 500; ++k) {
      const SymMat h = random_sym(2 + k % 2, rng);
      const HydDevSplit s = hyd_dev_split(h);
      // (h - t) + t can differ from h by one rounding of the diagonal.
      const double ulp = std::numeric_limits<double>::epsilon() * h.matrix().cwiseAbs().maxCoeff();
      CHECK(((s.hydrostatic + s.deviatoric).matrix() - h.matrix()).cwiseAbs().maxCoeff() <= ulp);
      CHECK(std::abs(s.deviatoric.trace()) < 1e-14);
    }
  }
}

TEST_CASE("nondimensionalize") {
  // Descending diagonal, so the reference eigenframe is the identity.
  const SpdMat ref(m2(5.0, 0.0, 0.0, 2.0));
  CHECK(rel(nondimensionalize(ref, ref).matrix(), Mat::Identity(2, 2)) < 1e-15);
  CHECK(rel(nondimensionalize(ref.scaled(2.0), ref).matrix(), 2.0 * Mat::Identity(2, 2)) < 1e-15);
  const SpdMat c(m2(3.0, 1.0, 1.0, 2.0));
  CHECK(rel(nondimensionalize(c, SpdMat::identity(2)).matrix(), c.matrix()) < 1e-15);

  Rng rng(29);
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 2;
    const SpdMat r = random_spd(d, rng), x = random_spd(d, rng);
    const Spectrum s = spd_spectrum(r);
    const Mat q = s.rotation.matrix();
    const Mat li = s.scaling.values().array().rsqrt().matrix().asDiagonal();
    CHECK(rel(nondimensionalize(x, r).matrix(), q * li * x.matrix() * li * q.transpose()) < 1e-12);
  }
}

TEST_CASE("frobenius_inner") {
  CHECK(frobenius_inner(SymMat::identity(2), SymMat::identity(2)) == 2.0);
  CHECK(frobenius_inner(SymMat(m2(1.0, 2.0, 2.0, 3.0)), SymMat::zero(2)) == 0.0);
  CHECK(frobenius_inner(SymMat(m2(1.0, 2.0, 2.0, 3.0)), SymMat(m2(0.0, 1.0, 1.0, 0.0))) == 4.0);
  CHECK_THROWS_AS(frobenius_inner(SymMat::identity(2), SymMat::identity(3)), ValidationError);

  Rng rng(19);
  for (int k = 0; k < 200; ++k) {
    const SymMat a = random_sym(3, rng), b = random_sym(3, rng);
    CHECK(frobenius_inner(a, b) == doctest::Approx(frobenius_inner(b, a)).epsilon(1e-14));
    CHECK(frobenius_inner(a, a) > 0.0);
  }
}

TEST_CASE("spectrum reconstruction is symmetric with a proper rotation") {
  Rng rng(23);
  for (int k = 0; k < 300; ++k) {
    const SpdMat c = random_spd(2 + k % 2, rng);
    const Spectrum s = spd_spectrum(c);
    CHECK(s.rotation.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rel(s.reconstruct().matrix(), c.matrix()) < 1e-12);
  }
}
