#pragma once

#include "gencp/cv/splits.hpp"
#include "gencp/models/model.hpp"

#include <functional>
#include <string>

namespace gencp {

// Builds a model fit on the given estimation rows.
using ModelFactory = std::function<ModelPtr(const IndexList& est)>;

struct CvEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::vector<double> per_fold; // ||y_P - g||^2 / |P|
};

// Mean over pairs of ||y_P - g(X_E, y_E, X_P)||^2 / |P|. A failing fold is rethrown with its id.
CvEstimate cv_mse(const ModelFactory& factory, const SplitPlan& plan, const Vector& y, std::uint64_t seed = 0);

// tr(S Sigma S^T Theta) + tr(Sigma Theta) - 2 tr(S Sigma Theta) for an n x n smoother.
double correction_trace(const Matrix& s, const Matrix& sigma_y, const Vector& theta_diag);

// Same quantity for OLS (no intercept) fit on rows E and evaluated on rows P, using only
// p x p and |P| x |E| sized products.
double ols_correction_trace(const Matrix& x, const Matrix& sigma_y, const IndexList& est, const IndexList& pred);

// Schemes applied to the training part of a target split.
struct CvScheme {
  std::string kind; // kfold | spatial | bloo | target
  int k = 5;
  double buffer_radius = 10.0;

  std::string label() const;
};

struct CvBiasRow {
  std::string scheme;
  double mean_ratio = 0.0;
  double std_error = 0.0;
  int reps = 0;
  int dropped = 0; // BLOO pairs dropped across reps
};

struct CvBiasStudy {
  const Locations* locations = nullptr;
  const Matrix* x = nullptr;
  const Matrix* sigma_y = nullptr;
  std::string target = "random"; // random | clustered
  double p_tr = 0.5;
  int reps = 100;
  std::uint64_t seed = 0;
};

// For every rep: draw a target split, then one E/P pair of each scheme inside its training set.
// Reports the per-point OLS correction trace of the pair divided by that of the target split.
std::vector<CvBiasRow> cv_bias_study(const std::vector<CvScheme>& schemes, const CvBiasStudy& study);

}  // namespace gencp
