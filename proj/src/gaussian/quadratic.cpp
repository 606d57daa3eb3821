#include "gencp/gaussian/quadratic.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace gencp {

QuadraticForm QuadraticForm::identity(Index n) { return diagonal(Vector::Ones(n)); }

QuadraticForm QuadraticForm::diagonal(Vector weights) {
  require(weights.allFinite(), "QuadraticForm: non-finite weight");
  require((weights.array() >= 0.0).all(), "QuadraticForm: diagonal weights must be >= 0");
  QuadraticForm q;
  q.diagonal_ = std::move(weights);
  return q;
}

QuadraticForm QuadraticForm::dense(Matrix theta) {
  require(theta.rows() == theta.cols(), "QuadraticForm: matrix must be square");
  require(theta.allFinite(), "QuadraticForm: non-finite entry");
  const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
  require((theta - theta.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, "QuadraticForm: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(theta, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() >= -1e-10 * scale, "QuadraticForm: matrix not positive semi-definite");
  QuadraticForm q;
  q.dense_ = 0.5 * (theta + theta.transpose());
  return q;
}

double QuadraticForm::norm2(const Vector& v) const {
  require(v.size() == size(), "quad_norm: dimension mismatch");
  if (diagonal_) return (diagonal_->array() * v.array().square()).sum();
  return std::max(0.0, v.dot(dense_ * v));
}

double QuadraticForm::trace_with(const Matrix& a) const {
  require(a.rows() == size() && a.cols() == size(), "trace_with: dimension mismatch");
  if (diagonal_) return diagonal_->dot(a.diagonal());
  return trace_product(dense_, a);
}

Matrix QuadraticForm::right_multiply(const Matrix& a) const {
  require(a.cols() == size(), "right_multiply: dimension mismatch");
  if (diagonal_) return a * diagonal_->asDiagonal();
  return a * dense_;
}

Vector QuadraticForm::apply(const Vector& v) const {
  require(v.size() == size(), "apply: dimension mismatch");
  if (diagonal_) return diagonal_->cwiseProduct(v);
  return dense_ * v;
}

double QuadraticForm::trace() const { return diagonal_ ? diagonal_->sum() : dense_.trace(); }

Matrix QuadraticForm::matrix() const {
  if (diagonal_) return diagonal_->asDiagonal();
  return dense_;
}

SelectorPair selector_quadratics(const IndexList& train_indices, Index n) {
  require(n >= 1, "selector_quadratics: n must be >= 1");
  std::vector<char> in_train(static_cast<std::size_t>(n), 0);
  for (Index i : train_indices) {
    require(i >= 0 && i < n, "selector_quadratics: index out of range");
    require(!in_train[static_cast<std::size_t>(i)], "selector_quadratics: duplicate index");
    in_train[static_cast<std::size_t>(i)] = 1;
  }
  SelectorPair out;
  out.train = train_indices;
  out.estimation = Matrix::Zero(static_cast<Index>(train_indices.size()), n);
  for (std::size_t r = 0; r < train_indices.size(); ++r) out.estimation(static_cast<Index>(r), train_indices[r]) = 1.0;
  Vector keep(n);
  for (Index i = 0; i < n; ++i) {
    keep(i) = in_train[static_cast<std::size_t>(i)] ? 0.0 : 1.0;
    if (!in_train[static_cast<std::size_t>(i)]) out.test.push_back(i);
  }
  out.prediction = QuadraticForm::diagonal(std::move(keep));
  out.degenerate = out.test.empty();
  return out;
}

double quad_norm(const Vector& v, const QuadraticForm& theta) { return theta.norm2(v); }

double trace_product(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows() && a.rows() == b.cols(), "trace_product: dimension mismatch");
  return a.cwiseProduct(b.transpose()).sum();
}

}  // namespace gencp
