#pragma once

#include "gencp/core.hpp"

namespace gencp {

// Weight matrix S of a linear prediction rule: predictions = S * response.
struct SmootherMatrix {
  Matrix weights;
  Flags flags;
};

// Penalized least squares through a thin SVD of the (optionally centred) fitting design.
// Predictions at x_pred are linear in the fitting response; lambda = 0 gives the
// minimum-norm least squares fit.
class RidgePath {
 public:
  RidgePath(const Matrix& x_fit, const Matrix& x_pred, bool intercept);

  Vector predict(const Vector& y_fit, double lambda) const;
  // n_pred x n_fit weight matrix.
  Matrix weights(double lambda) const;
  bool rank_deficient() const { return rank_deficient_; }
  Index fit_size() const { return m_; }

 private:
  Vector shrink(double lambda) const;

  bool intercept_;
  Index m_;
  Index n_pred_;
  bool rank_deficient_ = false;
  Vector singular_;
  Matrix u_;          // m x r
  Matrix pred_basis_; // n_pred x r, centred x_pred times V
};

SmootherMatrix ols_smoother(const Matrix& x);
SmootherMatrix ridge_smoother(const Matrix& x, double lambda);
SmootherMatrix tree_smoother(const Matrix& x, const Vector& y_fit, int max_depth);
// OLS projection onto the columns selected by the lasso at lambda; empty support gives
// the zero smoother, flagged "empty_support".
SmootherMatrix relaxed_lasso_smoother(const Matrix& x, const Vector& y_fit, double lambda);

}  // namespace gencp
