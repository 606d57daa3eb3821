#include "gencp/estimators/decomposition.hpp"

#include <Eigen/Cholesky>

namespace gencp {

namespace {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

RegressionDecomposition decompose(const JointGaussianModel& joint, double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), "decompose: alpha must be > 0");
  const Index n = joint.size();
  const Matrix& sy = joint.cov();
  const Matrix& c = joint.cross();
  RegressionDecomposition d;
  d.alpha = alpha;
  d.independent = joint.independent();
  if (d.independent) {
    d.gamma = Matrix::Zero(n, n);
    d.gamma_w = Matrix::Zero(n, n);
    d.sigma_n = joint.cov_star();
    d.sigma_n_star = joint.cov_star();
    d.sigma_i_gamma_y = sy;
    d.sigma_i_gamma_w_y = sy;
  } else {
    Eigen::LLT<Matrix> llt(sy);
    if (llt.info() != Eigen::Success) throw NumericalError("decompose: Sigma_Y is not positive definite");
    // Gamma^T = Sigma_Y^{-1} C^T
    d.gamma = llt.solve(c.transpose()).transpose();
    Eigen::LLT<Matrix> llt_w((1.0 + alpha) * sy);
    if (llt_w.info() != Eigen::Success) throw NumericalError("decompose: Sigma_W is not positive definite");
    d.gamma_w = llt_w.solve(c.transpose()).transpose();
    const double scale = std::max(1.0, d.gamma.cwiseAbs().maxCoeff());
    if ((d.gamma_w - d.gamma / (1.0 + alpha)).cwiseAbs().maxCoeff() > 1e-6 * scale)
      throw NumericalError("decompose: Gamma_W disagrees with Gamma / (1 + alpha); Sigma_Y is too ill-conditioned");
    const Matrix eye = Matrix::Identity(n, n);
    d.sigma_n = symmetrize(joint.cov_star() - d.gamma * c.transpose());
    d.sigma_n_star = symmetrize(joint.cov_star() - d.gamma_w * c.transpose());
    d.sigma_i_gamma_y = symmetrize((eye - d.gamma) * sy * (eye - d.gamma).transpose());
    d.sigma_i_gamma_w_y = symmetrize((eye - d.gamma_w) * sy * (eye - d.gamma_w).transpose());
  }
  const double perp = 1.0 + 1.0 / alpha;
  d.sigma_n_perp = perp * d.sigma_i_gamma_y;
  d.sigma_n_w = perp * d.sigma_i_gamma_w_y;
  return d;
}

}  // namespace gencp
