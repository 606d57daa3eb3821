#pragma once

#include "gencp/gaussian/covariance.hpp"
#include "gencp/gaussian/quadratic.hpp"
#include "gencp/models/model.hpp"

namespace gencp {

struct GroundTruth {
  double err = 0.0;       // E ||Y* - g(Y)||^2_Theta
  double err_se = 0.0;
  double err_alpha = 0.0; // E ||Y* - g(W)||^2_Theta, or S(W) Y for refit on Y
  double err_alpha_se = 0.0;
  double alpha = 0.0;
  RefitMode refit = RefitMode::w;
  int reps = 0;
};

// Direct simulation: rep r draws (Y*, Y) from the joint model, fits g on Y, then draws
// W = Y + sqrt(alpha) omega and refits. Both fits of a rep share one model seed, so alpha = 0
// reproduces the Err path exactly. A parametric bag is its own randomization and its Err_alpha
// is reported as its Err.
GroundTruth ground_truth(const JointGaussianModel& joint, const Model& model, RefitMode refit, double alpha, int reps,
                         std::uint64_t seed, const QuadraticForm& theta, unsigned jobs = 1);

GroundTruth ground_truth(const JointGaussianModel& joint, const Model& model, RefitMode refit, double alpha, int reps,
                         std::uint64_t seed);

}  // namespace gencp
