#pragma once

#include "gencp/core.hpp"
#include "gencp/gaussian/sampler.hpp"

#include <memory>
#include <string>

namespace gencp {

// Which response a fitted smoother is applied to when forming predictions.
//   y:       S(W) Y
//   w:       S(W) W (or g(W) for models without a smoother)
enum class RefitMode { y, w };

std::string to_string(RefitMode mode);
RefitMode parse_refit_mode(const std::string& text);

// Result of fitting a model to one response vector.
struct Fit {
  Vector prediction; // predictions at every row of the design
  // n x |train| weights: prediction = smoother * response(train). Empty unless requested from
  // a linear smoother.
  Matrix smoother;
  IndexList rows; // rows of the response the smoother columns refer to; empty means all
  Flags flags;

  bool has_smoother() const { return smoother.rows() > 0; }
  // smoother * response(rows)
  Vector smooth(const Vector& response) const {
    require(has_smoother(), "fit has no smoother");
    return rows.empty() ? Vector(smoother * response) : Vector(smoother * gather(response, rows));
  }
};

// Design shared by all fits of a model: features for every row, and the rows used for fitting.
struct ModelContext {
  Matrix x;
  IndexList train; // empty means all rows
  // Noise law used by parametric bagging (Sigma_Y or an estimate of it).
  std::shared_ptr<const GaussianSampler> noise;

  Index size() const { return x.rows(); }
  IndexList fit_rows() const { return train.empty() ? iota_indices(x.rows()) : train; }
};

struct BagConfig;

// A prediction rule bound to a fixed design. fit() only reads the training entries of the
// response and is a pure function of (response, seed).
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  // Exposes S(W) through Fit::smoother.
  virtual bool linear_smoother() const { return false; }
  // S depends on the fitting response.
  virtual bool adaptive() const { return true; }
  // Parametric bag over fission draws; gc estimators use the bag's own draws.
  virtual const BagConfig* bag() const { return nullptr; }

  virtual Fit fit(const Vector& response, std::uint64_t seed, bool want_smoother = false) const = 0;
};

using ModelPtr = std::shared_ptr<const Model>;

struct BagConfig {
  ModelPtr base;
  std::shared_ptr<const GaussianSampler> noise;
  double alpha = 1.0;
  int size = 100;
  RefitMode refit = RefitMode::w;
};

struct ModelSpec {
  std::string kind = "tree"; // zero|ols|ridge|tree|relaxed_lasso|lasso|ridge_cv|lasso_cv|enet_cv|bagged|np_bagged
  std::string label;         // display name; defaults to a description of the ModelSpec
  int depth = 3;
  double lambda = 1.0;
  double l1_ratio = 0.5;
  bool intercept = true;
  std::vector<double> grid;  // CV grid; default 10 log-spaced values on [0.01, 10]
  int folds = 5;
  std::uint64_t seed = 0;    // fixes within-model CV folds
  int bag_size = 100;
  double bag_alpha = 1.0;
  RefitMode bag_refit = RefitMode::w;
  std::shared_ptr<ModelSpec> base; // for bagged / np_bagged (default: tree of `depth`)

  std::string display_name() const;
};

ModelPtr make_model(const ModelSpec& spec, const ModelContext& ctx);

// Returns the given vector whatever the response; a general (non-smoother) rule.
ModelPtr fixed_prediction_model(Vector prediction);

}  // namespace gencp
