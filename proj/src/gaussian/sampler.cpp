#include "gencp/gaussian/sampler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace gencp {

GaussianSampler::GaussianSampler(const Matrix& covariance) {
  require(covariance.rows() == covariance.cols(), "GaussianSampler: covariance must be square");
  if (!covariance.allFinite()) throw NumericalError("GaussianSampler: non-finite covariance");
  const Index n = covariance.rows();
  if (n == 0) return;
  if (covariance.cwiseAbs().maxCoeff() == 0.0) {
    factor_ = Matrix::Zero(n, n);
    zero_ = true;
    return;
  }
  Eigen::LLT<Matrix> llt(covariance);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  const double jitter = 1e-10 * covariance.diagonal().mean();
  Matrix bumped = covariance;
  bumped.diagonal().array() += jitter;
  llt.compute(bumped);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    jittered_ = true;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(covariance);
  if (eig.info() != Eigen::Success) throw NumericalError("GaussianSampler: eigen decomposition failed");
  const double top = eig.eigenvalues().maxCoeff();
  if (eig.eigenvalues().minCoeff() < -1e-9 * std::max(top, 1e-300))
    throw NumericalError("GaussianSampler: covariance is not positive semi-definite");
  Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * root.asDiagonal();
  eigen_root_ = true;
}

Vector GaussianSampler::transform(const Vector& z) const {
  require(z.size() == dim(), "GaussianSampler: dimension mismatch");
  if (zero_) return Vector::Zero(dim());
  if (eigen_root_) return factor_ * z;
  return factor_.triangularView<Eigen::Lower>() * z;
}

Vector GaussianSampler::draw(Rng& rng) const { return transform(standard_normal(dim(), rng)); }

}  // namespace gencp
