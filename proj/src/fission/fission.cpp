#include "gencp/fission/fission.hpp"

#include <cmath>

namespace gencp {

namespace {

void check_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, "fission: alpha must be > 0");
}

}  // namespace

FissionWeights fission_weights(double alpha) {
  check_alpha(alpha);
  const double a_perp = 1.0 / (1.0 + 1.0 / alpha);
  return {1.0 - a_perp, a_perp};
}

FissionDraw fission_with_noise(const Vector& y, const Vector& omega, double alpha) {
  check_alpha(alpha);
  require(y.size() == omega.size(), "fission: noise dimension mismatch");
  const double root = std::sqrt(alpha);
  FissionDraw d;
  d.alpha = alpha;
  d.omega = omega;
  d.w = y + root * omega;
  d.w_perp = y - omega / root;
  return d;
}

FissionDraw fission(const Vector& y, const GaussianSampler& noise, double alpha, Rng& rng) {
  check_alpha(alpha);
  require(noise.dim() == y.size(), "fission: covariance dimension mismatch");
  return fission_with_noise(y, noise.draw(rng), alpha);
}

FissionDraw fission(const Vector& y, const GaussianSampler& noise, double alpha, std::uint64_t seed) {
  Rng rng(seed);
  return fission(y, noise, alpha, rng);
}

FissionDraw fission(const Vector& y, const Matrix& cov_y, double alpha, std::uint64_t seed) {
  check_alpha(alpha);
  return fission(y, GaussianSampler(cov_y), alpha, seed);
}

Vector recombine(const FissionDraw& draw) {
  const FissionWeights wts = fission_weights(draw.alpha);
  return wts.a * draw.w + wts.a_perp * draw.w_perp;
}

}  // namespace gencp
