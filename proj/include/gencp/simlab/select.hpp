#pragma once

#include "gencp/simlab/config.hpp"
#include "gencp/simlab/dataset.hpp"
#include "gencp/variogram/variogram.hpp"

namespace gencp {

// In-sample error estimates for one model, all per location.
struct SelectionRow {
  std::string model;
  double gc = std::nan("");
  double gc_se = std::nan("");
  double kfcv = std::nan("");
  double kfcv_se = std::nan("");
  double spcv = std::nan("");
  double spcv_se = std::nan("");
  int rank = 0; // by gc, 1 = best; 0 when gc failed
  std::string status = "ok";
};

struct SelectionResult {
  std::vector<SelectionRow> rows; // in config order
  EstimatedCovariance covariance;
};

// Estimates the noise covariance from the residuals of the covariance model, then scores every model
// with GC (refit on W) under that covariance, next to k-fold and spatial k-means CV. Every model uses
// the same seeds, so identical specs give identical rows.
SelectionResult select_models(const Dataset& data, const SelectConfig& config, unsigned jobs = 1);

// model,gc,gc_se,kfcv,kfcv_se,spcv,spcv_se,rank,status
std::string selection_to_csv(const SelectionResult& result);

// Synthetic stand-in for a geothermal survey: n scattered locations on [0, extent]^2, p smooth
// features, a nonlinear mean, and SSN noise with a Matern structured part.
struct FieldFixture {
  Dataset data;
  std::shared_ptr<const JointGaussianModel> joint;
};
FieldFixture synthetic_field(Index n, Index p, std::uint64_t seed, double extent = 50.0);

// Model used for residuals when a spec is a parametric bag (its base, or a tree of its depth).
ModelSpec residual_model_spec(const ModelSpec& spec);

}  // namespace gencp
