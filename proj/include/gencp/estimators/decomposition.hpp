#pragma once

#include "gencp/gaussian/covariance.hpp"

namespace gencp {

// Regression of Y* on Y (and on W = Y + sqrt(alpha) omega):
//   Gamma = C Sigma_Y^{-1},  N = Y* - Gamma Y,  Gamma_W = C Sigma_W^{-1} = Gamma / (1 + alpha),
//   N* = Y* - Gamma_W W,  N_perp = (I - Gamma) W_perp,  N^W = (I - Gamma_W) W_perp.
struct RegressionDecomposition {
  double alpha = 0.0;
  bool independent = false;
  Matrix gamma;
  Matrix gamma_w;
  Matrix sigma_n;           // Sigma_Y* - Gamma C^T
  Matrix sigma_n_star;      // Sigma_Y* - Gamma_W C^T
  Matrix sigma_i_gamma_y;   // (I - Gamma) Sigma_Y (I - Gamma)^T
  Matrix sigma_i_gamma_w_y; // (I - Gamma_W) Sigma_Y (I - Gamma_W)^T
  Matrix sigma_n_perp;      // (1 + 1/alpha) sigma_i_gamma_y
  Matrix sigma_n_w;         // (1 + 1/alpha) sigma_i_gamma_w_y
};

// Throws NumericalError when Sigma_Y is singular (and the cross block is nonzero).
RegressionDecomposition decompose(const JointGaussianModel& joint, double alpha);

}  // namespace gencp
