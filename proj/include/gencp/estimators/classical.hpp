#pragma once

#include "gencp/estimators/estimate.hpp"
#include "gencp/gaussian/covariance.hpp"
#include "gencp/gaussian/quadratic.hpp"
#include "gencp/models/model.hpp"

namespace gencp {

// ||y - S y||^2_Theta + 2 tr(Theta S Sigma_Y) for a fixed n x n smoother.
ErrorEstimate mallows_cp(const Vector& y, const Matrix& s, const Matrix& sigma_y, const QuadraticForm& theta);

// ||y - S y||^2_Theta + 2 tr(S) with Theta = Sigma^{-1}.
double sure_linear(const Vector& y, const Matrix& s, const Matrix& sigma);

// n x n smoother with the fit's columns placed at its fitting rows.
Matrix embed_smoother(const Fit& fit, Index n);

enum class OptimismVariant { efron, by };
enum class OptimismMode { iid, ssn };

std::string to_string(OptimismVariant v);

struct OptimismEstimates {
  ErrorEstimate efron;
  ErrorEstimate by;
};

// Paired parametric bootstrap (Y*(b), Y(b)) | y ~ N((y, y), alpha Sigma) with B draws:
//   cov  = (B-1)^{-1} sum_b g(Y(b))^T Theta (Y(b) - mean Y(.))
//   cov* = (B-1)^{-1} sum_b g(Y(b))^T Theta (Y*(b) - mean Y*(.))
//   Efron = ||y - g(y)||^2 + 2 (cov - cov*) + tr(Theta Sigma_Y*) - tr(Theta Sigma_Y)
//   BY    = ||y - g(y)||^2 + (2/alpha) (cov - cov*) + tr(Theta Sigma_Y*) - tr(Theta Sigma_Y)
// In iid mode only Y(b) ~ N(y, alpha Sigma_Y) is drawn and the cov* and trace terms are dropped.
OptimismEstimates efron_by_both(const Vector& y, const Model& g, const JointGaussianModel& joint, double alpha,
                                int draws, OptimismMode mode, std::uint64_t seed, const QuadraticForm& theta);

ErrorEstimate efron_by(const Vector& y, const Model& g, const JointGaussianModel& joint, double alpha, int draws,
                       OptimismVariant variant, OptimismMode mode, std::uint64_t seed, const QuadraticForm& theta);

}  // namespace gencp
