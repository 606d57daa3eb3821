#pragma once

#include "gencp/estimators/decomposition.hpp"
#include "gencp/estimators/estimate.hpp"
#include "gencp/fission/fission.hpp"
#include "gencp/gaussian/quadratic.hpp"
#include "gencp/models/bagging.hpp"
#include "gencp/models/model.hpp"

namespace gencp {

// Everything a single-draw GC value needs that does not depend on the draw: the regression
// matrices, the trace constants of both corrections and Sigma_Y (I - Gamma)^T Theta for the
// refit-on-Y covariance term. Built once per (covariance, alpha, Theta).
//
// Single-draw value, refit on Y:
//   ||(I - G) W_perp - (S(W) Y - G Y)||^2 + c_y + 2 tr((I - G)^T Theta (S(W) - G) Sigma_Y)
// refit on W (or a general rule g):
//   ||(I - G_W) W_perp - (g(W) - G_W W)||^2 + c_w
// with the random corrections
//   c_y = tr(Theta (Sigma_N - Sigma_(I-G)Y)) - ||(I - G) omega||^2 / alpha
//   c_w = tr(Theta (Sigma_N* - Sigma_(I-G_W)Y)) - ||(I - G_W) omega||^2 / alpha
// and the trace corrections tr(Theta (Sigma_N - Sigma_N_perp)), tr(Theta (Sigma_N* - Sigma_N^W)).
// With G = G_W = 0 these are the independent-response estimators (Sigma_N = Sigma_N* = Sigma_Y*).
class GcSetup {
 public:
  // Uses the cross block of the joint model (the correlated-response estimator).
  GcSetup(const JointGaussianModel& joint, double alpha, QuadraticForm theta);
  // Ignores any correlation between Y* and Y (the independent-response estimator).
  static GcSetup independent(const Matrix& sigma_y, const Matrix& sigma_y_star, double alpha, QuadraticForm theta);

  double alpha() const { return alpha_; }
  bool correlated() const { return gamma_.size() > 0; }
  const QuadraticForm& theta() const { return theta_; }
  Index size() const { return sigma_y_.rows(); }

  double value(const FissionDraw& draw, const Vector& y, const Fit& fit, RefitMode refit, Correction correction) const;

 private:
  GcSetup() = default;
  void finish(const Matrix& sigma_n, const Matrix& sigma_n_star, const Matrix& sigma_i_gamma_y,
              const Matrix& sigma_i_gamma_w_y);

  double alpha_ = 0.0;
  QuadraticForm theta_;
  Matrix sigma_y_;
  Matrix gamma_;   // empty when independent
  Matrix gamma_w_;
  double random_y_ = 0.0, trace_y_ = 0.0, random_w_ = 0.0, trace_w_ = 0.0;
  Matrix m_y_; // Sigma_Y (I - Gamma)^T Theta
  double gamma_m_y_ = 0.0; // tr(Gamma m_y)
};

// One-off single-draw estimators (build a setup per call).
double gc_indep(const FissionDraw& draw, const Vector& y, const Fit& fit, RefitMode refit, Correction correction,
                const Matrix& sigma_y, const Matrix& sigma_y_star, const QuadraticForm& theta);
double gc_corr(const FissionDraw& draw, const Vector& y, const Fit& fit, RefitMode refit,
               const JointGaussianModel& joint, const QuadraticForm& theta, Correction correction = Correction::random);

struct GcVariant {
  RefitMode refit = RefitMode::w;
  Correction correction = Correction::random;
};

// Coupled bootstrap: B independent fission draws (draw b uses derive_seed(seed, Stream::fission, {b})),
// one model fit per draw shared by every requested variant. Returns one estimate per variant.
std::vector<ErrorEstimate> gc_bootstrap(const Model& model, const Vector& y, const GcSetup& setup,
                                        const GaussianSampler& noise, int draws, std::uint64_t seed,
                                        const std::vector<GcVariant>& variants);

// K^{-1} [sum_k gc_k - tr(Z_perp^T Theta Z_perp)] with Z_perp the row-centred bag predictions.
double gc_bagged(const BagPredictions& bag, const std::vector<double>& per_draw_gc, const QuadraticForm& theta);

// Bagged GC for a parametric bag: reuses the bag's own K draws (bagged_fit with the same seed as
// Model::fit) for the per-draw values. setup.alpha() must equal the bag alpha.
std::vector<ErrorEstimate> gc_bagged_estimate(const Model& bagged_model, const Vector& y, const GcSetup& setup,
                                              std::uint64_t seed, const std::vector<Correction>& corrections);

}  // namespace gencp
