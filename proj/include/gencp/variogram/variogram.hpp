#pragma once

#include "gencp/core.hpp"
#include "gencp/gaussian/covariance.hpp"
#include "gencp/models/model.hpp"

#include <array>
#include <string>

namespace gencp {

// Matheron semivariances over equal-width distance bins. Empty bins are dropped.
struct EmpiricalVariogram {
  std::vector<double> centers; // mean pair distance in each retained bin
  std::vector<double> gamma;
  std::vector<long> counts;
  double max_lag = 0.0;
  double bin_width = 0.0;
  double residual_variance = 0.0; // population variance of the residuals
  double median_distance = 0.0;   // over all pairs

  std::size_t size() const { return centers.size(); }
  // bin,center,gamma,count
  std::string to_csv() const;
};

// max_lag <= 0 means half the largest pairwise distance. Pairs beyond max_lag are ignored.
// With more than one bin requested, an error is raised if every pair lands in the same bin.
EmpiricalVariogram empirical_variogram(const Locations& loc, const Vector& residuals, int n_bins = 15,
                                       double max_lag = 0.0);

// Parameter order: nugget, sill, smoothness, range. A parameter with lower == upper is pinned.
struct MaternBounds {
  std::array<double, 4> lower{};
  std::array<double, 4> upper{};

  static MaternBounds defaults(const EmpiricalVariogram& vg);
  bool pinned(int k) const { return lower[static_cast<std::size_t>(k)] == upper[static_cast<std::size_t>(k)]; }
};

MaternSpec default_matern_init(const EmpiricalVariogram& vg, const MaternBounds& bounds);

struct VariogramFit {
  MaternSpec spec;
  bool converged = false;
  double residual_norm = 0.0; // sqrt(sum_k w_k (gamma_k - model_k)^2)
  int iterations = 0;
  std::string message;

  // parameter,value plus the convergence fields
  std::string to_csv() const;
};

// Count-weighted least squares by Levenberg-Marquardt with projection onto the bounds after every
// step. Stops when the relative step falls below 1e-8 or after 200 iterations; the latter is
// reported through converged = false with the last iterate.
VariogramFit fit_matern(const EmpiricalVariogram& vg, const MaternBounds& bounds, const MaternSpec& init);
VariogramFit fit_matern(const EmpiricalVariogram& vg);

struct VariogramOptions {
  int n_bins = 15;
  double max_lag = 0.0;
  // sill below this fraction of the residual variance counts as no spatial structure
  double degenerate_sill = 1e-6;
};

struct EstimatedCovariance {
  EmpiricalVariogram variogram;
  VariogramFit fit;
  Vector residuals;
  bool diagonal_fallback = false;
  Flags flags;
  std::shared_ptr<const JointGaussianModel> joint;
};

// Fits the model on all of y, builds the variogram of y - g(y) and fits a Matern to it.
// Sigma_Y = Sigma_Y* = C with the nugget; the cross block is C without the nugget (SSN) or 0 (NSN).
// Both means are set to the fitted values. A degenerate fit falls back to var(r) I with no cross block.
EstimatedCovariance sigma_from_residuals(const Locations& loc, const Vector& y, const Model& model, NoiseMode mode,
                                         const VariogramOptions& options = {}, std::uint64_t seed = 0);

}  // namespace gencp
