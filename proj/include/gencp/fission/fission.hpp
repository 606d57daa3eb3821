#pragma once

#include "gencp/core.hpp"
#include "gencp/gaussian/sampler.hpp"

namespace gencp {

// Default noise-elevation level for fission-based estimators.
inline constexpr double kDefaultAlpha = 0.05;

// One randomization of y: W = y + sqrt(alpha) omega and W_perp = y - omega / sqrt(alpha),
// omega ~ N(0, Sigma_Y). The two views are independent with covariances
// (1 + alpha) Sigma_Y and (1 + 1/alpha) Sigma_Y.
struct FissionDraw {
  double alpha = kDefaultAlpha;
  Vector omega;
  Vector w;
  Vector w_perp;

  double w_scale() const { return 1.0 + alpha; }
  double w_perp_scale() const { return 1.0 + 1.0 / alpha; }
  Matrix cov_w(const Matrix& cov_y) const { return w_scale() * cov_y; }
  Matrix cov_w_perp(const Matrix& cov_y) const { return w_perp_scale() * cov_y; }
};

// Weights (a, a_perp) with y = a W + a_perp W_perp: a_perp = (1 + 1/alpha)^{-1}, a = 1 - a_perp.
struct FissionWeights {
  double a;
  double a_perp;
};
FissionWeights fission_weights(double alpha);

// Builds the views for a given noise vector.
FissionDraw fission_with_noise(const Vector& y, const Vector& omega, double alpha);

// omega drawn through the sampler's cached factor of Sigma_Y.
FissionDraw fission(const Vector& y, const GaussianSampler& noise, double alpha, std::uint64_t seed);
FissionDraw fission(const Vector& y, const GaussianSampler& noise, double alpha, Rng& rng);
FissionDraw fission(const Vector& y, const Matrix& cov_y, double alpha, std::uint64_t seed);

Vector recombine(const FissionDraw& draw);

}  // namespace gencp
