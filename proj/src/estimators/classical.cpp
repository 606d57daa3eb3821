#include "gencp/estimators/classical.hpp"

#include <Eigen/Cholesky>

namespace gencp {

ErrorEstimate mallows_cp(const Vector& y, const Matrix& s, const Matrix& sigma_y, const QuadraticForm& theta) {
  const Index n = y.size();
  require(s.rows() == n && s.cols() == n, "mallows_cp: smoother dimension mismatch");
  require(sigma_y.rows() == n && sigma_y.cols() == n, "mallows_cp: covariance dimension mismatch");
  require(theta.size() == n, "mallows_cp: Theta dimension mismatch");
  const double value = theta.norm2(y - s * y) + 2.0 * theta.trace_with(s * sigma_y);
  ErrorEstimate e = ErrorEstimate::from_draws("mallows", {value});
  e.draws = 1;
  return e;
}

double sure_linear(const Vector& y, const Matrix& s, const Matrix& sigma) {
  const Index n = y.size();
  require(s.rows() == n && s.cols() == n, "sure_linear: smoother dimension mismatch");
  require(sigma.rows() == n && sigma.cols() == n, "sure_linear: covariance dimension mismatch");
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("sure_linear: Sigma is singular");
  const Vector r = y - s * y;
  return r.dot(llt.solve(r)) + 2.0 * s.trace();
}

Matrix embed_smoother(const Fit& fit, Index n) {
  require(fit.has_smoother(), "embed_smoother: fit has no smoother");
  require(fit.smoother.rows() == n, "embed_smoother: dimension mismatch");
  if (fit.rows.empty()) return fit.smoother;
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < fit.rows.size(); ++k) out.col(fit.rows[k]) = fit.smoother.col(static_cast<Index>(k));
  return out;
}

}  // namespace gencp
