#include "doctest.h"

#include "gencp/fission/fission.hpp"
#include "gencp/gaussian/covariance.hpp"

using namespace gencp;

TEST_CASE("weights sum to one and recombine exactly") {
  for (double alpha : {0.01, 0.05, 0.5, 1.0, 10.0}) {
    const FissionWeights w = fission_weights(alpha);
    CHECK(w.a + w.a_perp == doctest::Approx(1.0));
    CHECK(w.a_perp == doctest::Approx(alpha / (1.0 + alpha)));
  }
  Vector y = Vector::LinSpaced(6, -3.0, 4.0);
  Vector omega(6);
  omega << 0.3, -1.0, 2.0, 0.0, 5.0, -0.7;
  const FissionDraw d = fission_with_noise(y, omega, 0.2);
  CHECK((d.w - (y + std::sqrt(0.2) * omega)).norm() < 1e-14);
  CHECK((d.w_perp - (y - omega / std::sqrt(0.2))).norm() < 1e-14);
  CHECK((recombine(d) - y).norm() < 1e-12);
}

TEST_CASE("draws are reproducible from a seed") {
  const Matrix cov = build_sigma(Locations::grid(3, 3.0), MaternSpec{0.1, 1.0, 0.5, 1.0});
  const GaussianSampler s(cov);
  const Vector y = Vector::Ones(9);
  const FissionDraw a = fission(y, s, 0.05, 42), b = fission(y, s, 0.05, 42), c = fission(y, s, 0.05, 43);
  CHECK(a.omega == b.omega);
  CHECK(a.omega != c.omega);
  const FissionDraw m = fission(y, cov, 0.05, 42);
  CHECK((m.omega - a.omega).norm() < 1e-12);
}

TEST_CASE("view covariances") {
  const FissionDraw d = fission_with_noise(Vector::Zero(2), Vector::Zero(2), 0.25);
  const Matrix s = Matrix::Identity(2, 2) * 2.0;
  CHECK(d.cov_w(s)(0, 0) == doctest::Approx(2.5));
  CHECK(d.cov_w_perp(s)(1, 1) == doctest::Approx(10.0));
}

TEST_CASE("invalid alpha is rejected") {
  CHECK_THROWS(fission_with_noise(Vector::Zero(2), Vector::Zero(2), 0.0));
  CHECK_THROWS(fission_with_noise(Vector::Zero(2), Vector::Zero(3), 0.1));
}
