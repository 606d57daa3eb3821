#pragma once

#include "gencp/gaussian/covariance.hpp"
#include "gencp/simlab/config.hpp"

namespace gencp {

struct Design {
  Locations locations;
  Matrix x;
  Vector beta; // zero for the friedman mean
  Vector mean; // X beta, or the friedman function of the rescaled columns
};

// ceil(2 ln n)
Index spike_count(Index n);

// Grid of round(sqrt n)^2 points (the nearest square when n is not one). Each column of X is a
// sum of ceil(2 ln n) spikes with magnitudes Unif([-3,-1] u [1,3]) spread by the smoothing kernel.
// For the friedman mean the columns are min-max scaled to [0, 1].
Design gen_design(const DesignConfig& config, std::uint64_t seed);

// (10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5) / 6 per row.
Vector friedman_mean(const Matrix& x);

// Noise law of the simulations: Sigma_Y = c (delta Sigma_S + (1 - delta) I) scaled to the target SNR.
JointGaussianModel simulation_joint(const Design& design, const NoiseConfig& noise, NoiseMode mode);

}  // namespace gencp
