#include "gencp/models/lasso.hpp"
#include "gencp/models/smoothers.hpp"
#include "gencp/models/tree.hpp"

#include <Eigen/SVD>

#include <limits>

namespace gencp {

RidgePath::RidgePath(const Matrix& x_fit, const Matrix& x_pred, bool intercept)
    : intercept_(intercept), m_(x_fit.rows()), n_pred_(x_pred.rows()) {
  require(m_ >= 1, "RidgePath: empty fitting set");
  require(x_fit.cols() == x_pred.cols(), "RidgePath: feature dimension mismatch");
  Matrix xc = x_fit;
  Matrix xp = x_pred;
  if (intercept_) {
    const Eigen::RowVectorXd mean = x_fit.colwise().mean();
    xc.rowwise() -= mean;
    xp.rowwise() -= mean;
  }
  Eigen::BDCSVD<Matrix> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  const double tol = static_cast<double>(std::max(xc.rows(), xc.cols())) * std::numeric_limits<double>::epsilon() *
                     std::max(top, 1e-300);
  Index rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  Index full = std::min(xc.rows() - (intercept_ ? 1 : 0), xc.cols());
  rank_deficient_ = rank < full;
  singular_ = s.head(rank);
  u_ = svd.matrixU().leftCols(rank);
  pred_basis_ = xp * svd.matrixV().leftCols(rank);
}

Vector RidgePath::shrink(double lambda) const {
  require(lambda >= 0.0, "RidgePath: lambda must be >= 0");
  return singular_.array() / (singular_.array().square() + lambda);
}

Vector RidgePath::predict(const Vector& y_fit, double lambda) const {
  require(y_fit.size() == m_, "RidgePath: response dimension mismatch");
  double offset = 0.0;
  Vector centred = y_fit;
  if (intercept_) {
    offset = y_fit.mean();
    centred.array() -= offset;
  }
  Vector coef = shrink(lambda).cwiseProduct(u_.transpose() * centred);
  Vector pred = pred_basis_ * coef;
  pred.array() += offset;
  return pred;
}

Matrix RidgePath::weights(double lambda) const {
  Matrix h = pred_basis_ * shrink(lambda).asDiagonal() * u_.transpose();
  if (intercept_) {
    const double inv_m = 1.0 / static_cast<double>(m_);
    Vector row_sum = h.rowwise().sum();
    h.colwise() -= row_sum * inv_m;
    h.array() += inv_m;
  }
  return h;
}

SmootherMatrix ols_smoother(const Matrix& x) {
  RidgePath path(x, x, false);
  SmootherMatrix out{path.weights(0.0), {}};
  if (path.rank_deficient()) out.flags.push_back("pseudo_inverse");
  return out;
}

SmootherMatrix ridge_smoother(const Matrix& x, double lambda) {
  require(lambda >= 0.0, "ridge_smoother: lambda must be >= 0");
  RidgePath path(x, x, false);
  SmootherMatrix out{path.weights(lambda), {}};
  if (lambda == 0.0 && path.rank_deficient()) out.flags.push_back("pseudo_inverse");
  return out;
}

SmootherMatrix tree_smoother(const Matrix& x, const Vector& y_fit, int max_depth) {
  require(max_depth >= 0, "tree_smoother: max_depth must be >= 0");
  TreeFitter fitter(x, max_depth);
  RegressionTree tree = fitter.fit(y_fit);
  return {tree.smoother(x), {}};
}

SmootherMatrix relaxed_lasso_smoother(const Matrix& x, const Vector& y_fit, double lambda) {
  LassoSolver solver(x, false);
  LassoResult fit = solver.solve(y_fit, lambda);
  IndexList support = fit.support();
  const Index n = x.rows();
  if (support.empty()) return {Matrix::Zero(n, n), {"empty_support"}};
  Matrix xa(n, static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) xa.col(static_cast<Index>(j)) = x.col(support[j]);
  SmootherMatrix out = ols_smoother(xa);
  return out;
}

}  // namespace gencp
