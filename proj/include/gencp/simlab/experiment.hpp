#pragma once

#include "gencp/simlab/config.hpp"
#include "gencp/simlab/design.hpp"

#include <iosfwd>

namespace gencp {

// One cell of the long-format results table. Truth rows use estimator "err" or "err_alpha";
// every other row names the truth row it targets through `target`.
struct ResultRow {
  std::string setting; // nsn | ssn
  std::string split;
  int rep = 0;
  std::uint64_t seed = 0; // data seed of the rep
  std::string model;
  std::string estimator;
  std::string correction;
  std::string refit;
  double alpha = 0.0;
  int draws = 0;
  double value = 0.0;
  double std_error = 0.0;
  std::string target;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
  // Key other rows use to refer to this one as a target.
  std::string truth_key() const;
};

struct ExperimentResults {
  std::vector<ResultRow> rows;
  Design design;
};

std::string truth_key(const std::string& estimator, double alpha, const std::string& refit);

// Runs every (noise mode, split) setting for config.reps Monte-Carlo reps. Each rep draws its data
// from derive_seed(seed, Stream::data, {mode, rep}) and records the single-draw ground truths
// next to the estimates. Failing cells are kept with their error message as status.
ExperimentResults run_experiment(const ExperimentConfig& config, unsigned jobs = 1, std::ostream* log = nullptr);

// setting,split,rep,seed,model,estimator,correction,refit,alpha,B,value,se,target,status
std::string results_to_csv(const ExperimentResults& results);

}  // namespace gencp
