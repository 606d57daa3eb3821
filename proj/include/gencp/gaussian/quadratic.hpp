#pragma once

#include "gencp/core.hpp"

#include <optional>

namespace gencp {

// Symmetric PSD weight matrix Theta defining ||v||^2_Theta = v^T Theta v.
// Diagonal forms (identity, test-set selectors) are stored as their diagonal so norms and
// traces cost O(n).
class QuadraticForm {
 public:
  QuadraticForm() = default;

  static QuadraticForm identity(Index n);
  static QuadraticForm diagonal(Vector weights);
  // Validates symmetry to 1e-10 and positive semi-definiteness.
  static QuadraticForm dense(Matrix theta);

  Index size() const { return diagonal_ ? diagonal_->size() : dense_.rows(); }
  bool is_diagonal() const { return diagonal_.has_value(); }
  const Vector& diagonal_weights() const { return *diagonal_; }

  double norm2(const Vector& v) const;
  // tr(Theta A)
  double trace_with(const Matrix& a) const;
  // A Theta
  Matrix right_multiply(const Matrix& a) const;
  Vector apply(const Vector& v) const;
  double trace() const;
  Matrix matrix() const;

 private:
  std::optional<Vector> diagonal_;
  Matrix dense_;
};

// Selector for a training set T: Theta_e (|T| x n) picks the training rows and
// Theta_p = I - Theta_e^T Theta_e keeps only the held-out rows.
struct SelectorPair {
  IndexList train;
  IndexList test;
  Matrix estimation;        // Theta_e
  QuadraticForm prediction; // Theta_p
  bool degenerate = false;  // T = [n], so Theta_p = 0
};

SelectorPair selector_quadratics(const IndexList& train_indices, Index n);

double quad_norm(const Vector& v, const QuadraticForm& theta);

// tr(A B) = sum_ij A_ij B_ji without forming the product.
double trace_product(const Matrix& a, const Matrix& b);

}  // namespace gencp
