#pragma once

#include "gencp/core.hpp"
#include "gencp/rng.hpp"

namespace gencp {

// Square-root factor L of a covariance matrix (cov = L L^T) used to draw N(0, cov).
//
// Factorization policy: plain Cholesky; on failure one retry with 1e-10 * mean(diag) added to
// the diagonal; if that fails too, a symmetric eigen square root is used provided the matrix is
// PSD to within 1e-9 * max eigenvalue (singular but valid, e.g. perfectly shared noise).
// Anything more indefinite raises NumericalError.
class GaussianSampler {
 public:
  GaussianSampler() = default;
  explicit GaussianSampler(const Matrix& covariance);

  Index dim() const { return factor_.rows(); }
  const Matrix& factor() const { return factor_; }
  bool jittered() const { return jittered_; }
  bool eigen_root() const { return eigen_root_; }

  Vector draw(Rng& rng) const;
  // L z for a caller-provided standard normal vector.
  Vector transform(const Vector& z) const;

 private:
  Matrix factor_;
  bool zero_ = false;
  bool jittered_ = false;
  bool eigen_root_ = false;
};

}  // namespace gencp
