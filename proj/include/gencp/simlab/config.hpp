#pragma once

#include "gencp/estimators/classical.hpp"
#include "gencp/estimators/estimate.hpp"
#include "gencp/gaussian/covariance.hpp"
#include "gencp/gaussian/matern.hpp"
#include "gencp/models/model.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace gencp {

using Json = nlohmann::json;

struct DesignConfig {
  std::string mean = "linear"; // linear (X beta) | friedman
  Index n = 100;
  Index p = 200;
  Index s = 5;
  double extent = 0.0;          // side of the square; 0 means sqrt(n) (unit spacing)
  MaternSpec smoothing{0.0, 1.0, 0.5, 1.0};
};

struct NoiseConfig {
  std::vector<NoiseMode> modes{NoiseMode::nsn};
  double delta = 0.75;
  double snr = 0.4;
  MaternSpec structured{0.0, 1.0, 2.5, 5.0};
};

struct SplitConfig {
  std::string kind = "none"; // none | random | clustered
  double p_train = 0.25;

  std::string label() const;
};

// One estimator family. Kinds:
//   gc        coupled-bootstrap GC (bagged models use their own draws)
//   mallows   fixed linear smoothers only
//   efron, by parametric bootstrap optimism
//   kfcv, spcv, bloocv
//   split     naive held-out error on y (split settings only)
struct EstimatorConfig {
  std::string kind;
  double alpha = 0.05;
  int draws = 100;
  std::vector<Correction> corrections{Correction::random};
  RefitMode refit = RefitMode::w;
  std::string flavor = "auto";       // auto | corr | indep (gc)
  std::string covariance = "oracle"; // oracle | estimated (gc)
  std::string mode = "auto";         // auto | iid | ssn (efron, by)
  int folds = 5;
  double buffer = 2.0;               // bloocv radius

  std::string label() const;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  DesignConfig design;
  NoiseConfig noise;
  std::vector<ModelSpec> models;
  std::vector<EstimatorConfig> estimators;
  std::vector<SplitConfig> splits{SplitConfig{}};
  int reps = 200;
  int truth_reps = 500; // for the ground-truth subcommand
};

struct CvStudyConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  DesignConfig design;
  NoiseConfig noise;
  std::vector<std::string> targets{"random", "clustered"};
  double p_train = 0.5;
  std::vector<Json> schemes; // parsed into CvScheme by the study
  int reps = 100;
  int mc_reps = 0;           // > 0 adds an MC check of the target correction trace
};

struct SelectConfig {
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::vector<ModelSpec> models;
  NoiseMode mode = NoiseMode::ssn;
  double alpha = 0.05;
  int draws = 100;
  Correction correction = Correction::random;
  int folds = 5;
  int n_bins = 15;
  // model used for the residuals behind the covariance estimate; defaults to the first model
  std::optional<ModelSpec> covariance_model;
};

MaternSpec parse_matern(const Json& j);
Json matern_to_json(const MaternSpec& spec);
ModelSpec parse_model_spec(const Json& j);
EstimatorConfig parse_estimator(const Json& j);
DesignConfig parse_design(const Json& j);
NoiseConfig parse_noise(const Json& j);

ExperimentConfig parse_experiment_config(const Json& j);
CvStudyConfig parse_cv_study_config(const Json& j);
SelectConfig parse_select_config(const Json& j);

// Reads and parses a JSON file; syntax errors and unknown keys raise ConfigError.
Json read_json_file(const std::string& path);

}  // namespace gencp
