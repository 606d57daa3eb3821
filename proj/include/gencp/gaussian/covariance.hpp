#pragma once

#include "gencp/core.hpp"
#include "gencp/gaussian/matern.hpp"
#include "gencp/gaussian/sampler.hpp"

#include <memory>
#include <string>
#include <utility>

namespace gencp {

// n points in R^d, one per row.
class Locations {
 public:
  Locations() = default;
  explicit Locations(Matrix points);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  double distance(Index i, Index j) const { return (points_.row(i) - points_.row(j)).norm(); }
  Matrix distances() const;

  // side x side grid of cell centres covering [0, extent]^2.
  static Locations grid(Index side, double extent);

 private:
  Matrix points_;
};

// Sigma_ij = C(||l_i - l_j||). With include_nugget = false the nugget is dropped everywhere.
// Duplicate locations without a nugget give a singular matrix; that is reported by the
// consumers that need a factorization, not repaired here.
Matrix build_sigma(const Locations& loc, const MaternSpec& spec, bool include_nugget = true);

enum class NoiseMode { nsn, ssn };

std::string to_string(NoiseMode mode);
NoiseMode parse_noise_mode(const std::string& text);

// Joint law of the stacked vector (Y*, Y) ~ N((mu*, mu), [[S*, C], [C^T, S]]).
// Factors of the response block and the stacked matrix are computed once at construction.
class JointGaussianModel {
 public:
  JointGaussianModel(Vector mean_star, Vector mean, Matrix cov_star, Matrix cov, Matrix cross);

  Index size() const { return mean_.size(); }
  const Vector& mean_star() const { return mean_star_; }
  const Vector& mean() const { return mean_; }
  const Matrix& cov_star() const { return cov_star_; }
  const Matrix& cov() const { return cov_; }
  // cov(Y*, Y)
  const Matrix& cross() const { return cross_; }
  bool independent() const { return independent_; }

  Matrix stacked_cov() const;
  const GaussianSampler& response_sampler() const { return *response_; }
  const GaussianSampler& stacked_sampler() const { return *stacked_; }
  std::shared_ptr<const GaussianSampler> response_sampler_ptr() const { return response_; }

  // Same covariance, different mean.
  JointGaussianModel with_mean(Vector mean_star, Vector mean) const;

 private:
  JointGaussianModel() = default;

  Vector mean_star_;
  Vector mean_;
  Matrix cov_star_;
  Matrix cov_;
  Matrix cross_;
  bool independent_ = false;
  std::shared_ptr<const GaussianSampler> response_;
  std::shared_ptr<const GaussianSampler> stacked_;
};

// Builds the simulation joint model: Sigma_Y = Sigma_Y* = c (delta S + (1 - delta) I),
// cross = 0 (NSN) or c delta S (SSN), with c chosen so var_n(x_beta) / Sigma_ii = snr.
// var_n uses the population divisor n.
JointGaussianModel make_joint(NoiseMode mode, const Matrix& structured, double delta, const Vector& x_beta,
                              double snr_target);

struct JointSample {
  Vector y_star;
  Vector y;
};

JointSample sample_joint(const JointGaussianModel& model, std::uint64_t seed);
JointSample sample_joint(const JointGaussianModel& model, Rng& rng);

}  // namespace gencp
