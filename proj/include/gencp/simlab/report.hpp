#pragma once

#include "gencp/simlab/experiment.hpp"

namespace gencp {

// Aggregate of one (setting, split, model, estimator, correction, refit, alpha) group over reps.
struct SummaryRow {
  std::string setting, split, model, estimator, correction, refit;
  double alpha = 0.0;
  int draws = 0;
  int count = 0;  // successful reps
  int failed = 0;
  double mean = 0.0;
  double se = 0.0;     // across reps
  double mean_reported_se = 0.0;
  double relative = 0.0; // mean / mean(err)
  double relative_se = 0.0;
  std::string target;
  double target_mean = 0.0;
  double diff = 0.0;        // mean - target mean
  double combined_se = 0.0; // sqrt(se^2 + se_target^2)
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

// Box plots of per-rep relative values (value / mean err of the model) for one setting and split,
// one box per (model, estimator, correction), with mean +- 2 SE whiskers and a reference line at 1.
std::string box_plot_svg(const std::vector<ResultRow>& rows, const std::string& setting, const std::string& split);

// results.csv, summary.csv, truth.csv and one plot_<setting>_<split>.svg per setting.
void write_report(const ExperimentResults& results, const std::string& dir);

// Looks up a summary row; nullptr when absent.
const SummaryRow* find_summary(const std::vector<SummaryRow>& rows, const std::string& setting, const std::string& split,
                               const std::string& model, const std::string& estimator,
                               const std::string& correction = "", const std::string& refit = "", double alpha = -1.0);

}  // namespace gencp
