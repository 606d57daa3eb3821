#include "doctest.h"

#include "gencp/gaussian/covariance.hpp"
#include "gencp/gaussian/matern.hpp"
#include "gencp/gaussian/quadratic.hpp"
#include "gencp/gaussian/sampler.hpp"
#include "gencp/rng.hpp"

#include <cmath>

using namespace gencp;

namespace {

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, trapezoid rule on a long enough interval.
double bessel_k_quadrature(double nu, double x) {
  const double h = 1e-3;
  double sum = 0.5 * std::exp(-x);
  for (int i = 1; i < 40000; ++i) {
    const double t = i * h;
    const double v = std::exp(-x * std::cosh(t)) * std::cosh(nu * t);
    sum += v;
    if (v < 1e-300) break;
  }
  return sum * h;
}

double matern_reference(double r, double nu) {
  if (r == 0.0) return 1.0;
  const double z = std::sqrt(2.0 * nu) * r;
  return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(z, nu) * bessel_k_quadrature(nu, z);
}

}  // namespace

TEST_CASE("matern closed forms agree with the integral representation") {
  for (double nu : {0.5, 1.5, 2.5, 0.8, 3.7})
    for (double r : {0.01, 0.3, 1.0, 2.2, 5.0}) {
      INFO("nu=" << nu << " r=" << r);
      CHECK(matern_correlation(r, nu) == doctest::Approx(matern_reference(r, nu)).epsilon(1e-8));
      CHECK(matern_correlation_bessel(r, nu) == doctest::Approx(matern_reference(r, nu)).epsilon(1e-8));
    }
  CHECK(matern_correlation(0.0, 1.5) == 1.0);
  CHECK(matern_correlation(1.0, 0.5) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("matern covariance, nugget and semivariance") {
  const MaternSpec spec{0.3, 2.0, 1.5, 4.0};
  CHECK(matern_cov(0.0, spec) == doctest::Approx(2.3));
  CHECK(matern_cov(1.0, spec) == doctest::Approx(2.0 * matern_correlation(0.25, 1.5)));
  CHECK(matern_semivariance(0.0, spec) == 0.0);
  CHECK(matern_semivariance(1.0, spec) == doctest::Approx(2.3 - matern_cov(1.0, spec)));
  // approaches the sill plus nugget far away
  CHECK(matern_semivariance(1e3, spec) == doctest::Approx(2.3).epsilon(1e-9));
  MaternSpec bad = spec;
  bad.range = 0.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("grid locations and sigma") {
  const Locations loc = Locations::grid(4, 8.0);
  REQUIRE(loc.size() == 16);
  CHECK(loc.points()(0, 0) == doctest::Approx(1.0));
  CHECK(loc.points().maxCoeff() == doctest::Approx(7.0));
  const MaternSpec spec{0.5, 1.0, 2.5, 3.0};
  const Matrix s = build_sigma(loc, spec);
  const Matrix s0 = build_sigma(loc, spec, false);
  CHECK((s - s.transpose()).norm() == 0.0);
  CHECK((s - s0).isApprox(0.5 * Matrix::Identity(16, 16)));
  CHECK(s(0, 5) == doctest::Approx(matern_cov(loc.distance(0, 5), spec)));
}

TEST_CASE("sampler reproduces its covariance") {
  const Matrix cov = build_sigma(Locations::grid(3, 3.0), MaternSpec{0.1, 1.0, 1.5, 2.0});
  const GaussianSampler sampler(cov);
  CHECK((sampler.factor() * sampler.factor().transpose() - cov).norm() < 1e-10);
  Rng rng(7);
  const int n = 20000;
  Matrix acc = Matrix::Zero(9, 9);
  for (int i = 0; i < n; ++i) {
    const Vector z = sampler.draw(rng);
    acc += z * z.transpose();
  }
  acc /= n;
  for (Index i = 0; i < 9; ++i)
    for (Index j = 0; j < 9; ++j) {
      const double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / n);
      CHECK(std::abs(acc(i, j) - cov(i, j)) < 5.0 * se);
    }
}

TEST_CASE("sampler handles singular and rejects indefinite matrices") {
  Matrix shared = Matrix::Ones(3, 3);
  const GaussianSampler s(shared);
  CHECK((s.factor() * s.factor().transpose() - shared).norm() < 1e-8);
  Matrix bad = Matrix::Identity(3, 3);
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(GaussianSampler{bad}, NumericalError);
}

TEST_CASE("make_joint scales to the target snr") {
  const Locations loc = Locations::grid(5, 5.0);
  const Matrix st = build_sigma(loc, MaternSpec{0.0, 1.0, 2.5, 5.0});
  Vector mean = Vector::LinSpaced(25, -1.0, 2.0);
  const double var = (mean.array() - mean.mean()).square().mean();
  for (NoiseMode mode : {NoiseMode::nsn, NoiseMode::ssn}) {
    const JointGaussianModel j = make_joint(mode, st, 0.75, mean, 0.4);
    CHECK(var / j.cov()(3, 3) == doctest::Approx(0.4));
    CHECK((j.cov() - j.cov_star()).norm() == 0.0);
    if (mode == NoiseMode::nsn) {
      CHECK(j.independent());
      CHECK(j.cross().norm() == 0.0);
    } else {
      const double c = j.cov()(0, 0) / (0.75 + 0.25);
      CHECK((j.cross() - c * 0.75 * st).norm() < 1e-10);
    }
  }
}

TEST_CASE("joint samples have the stated cross covariance") {
  const Locations loc = Locations::grid(2, 2.0);
  const Matrix st = build_sigma(loc, MaternSpec{0.0, 1.0, 0.5, 2.0});
  const JointGaussianModel j = make_joint(NoiseMode::ssn, st, 0.6, Vector::LinSpaced(4, 0.0, 1.0), 1.0);
  Rng rng(3);
  const int n = 20000;
  Matrix acc = Matrix::Zero(4, 4);
  for (int i = 0; i < n; ++i) {
    const JointSample s = sample_joint(j, rng);
    acc += (s.y_star - j.mean_star()) * (s.y - j.mean()).transpose();
  }
  acc /= n;
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 4; ++b) {
      const double se = std::sqrt((j.cov_star()(a, a) * j.cov()(b, b) + j.cross()(a, b) * j.cross()(a, b)) / n);
      CHECK(std::abs(acc(a, b) - j.cross()(a, b)) < 5.0 * se);
    }
}

TEST_CASE("quadratic forms") {
  const QuadraticForm id = QuadraticForm::identity(3);
  Vector v(3);
  v << 1, 2, 3;
  CHECK(id.norm2(v) == 14.0);
  CHECK(id.trace() == 3.0);
  Matrix t(2, 2);
  t << 2, 1, 1, 2;
  const QuadraticForm d = QuadraticForm::dense(t);
  Vector u(2);
  u << 1, -1;
  CHECK(d.norm2(u) == doctest::Approx(2.0));
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  CHECK(d.trace_with(a) == doctest::Approx((t * a).trace()));
  Matrix asym = t;
  asym(0, 1) = 0.5;
  CHECK_THROWS(QuadraticForm::dense(asym));
  Matrix neg = -t;
  CHECK_THROWS(QuadraticForm::dense(neg));
  CHECK(trace_product(a, t) == doctest::Approx((a * t).trace()));

  const SelectorPair sel = selector_quadratics({0, 2}, 4);
  CHECK(sel.test == IndexList{1, 3});
  CHECK(sel.prediction.diagonal_weights() == Vector((Vector(4) << 0, 1, 0, 1).finished()));
  CHECK(sel.estimation.rows() == 2);
  CHECK(selector_quadratics({0, 1, 2, 3}, 4).degenerate);
}

TEST_CASE("seed derivation is deterministic and stream dependent") {
  CHECK(derive_seed(1, Stream::data, {2}) == derive_seed(1, Stream::data, {2}));
  CHECK(derive_seed(1, Stream::data, {2}) != derive_seed(1, Stream::fission, {2}));
  CHECK(derive_seed(1, Stream::data, {2, 3}) != derive_seed(1, Stream::data, {3, 2}));
}
