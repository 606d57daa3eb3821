#pragma once

#include "gencp/core.hpp"

#include <string>

namespace gencp {

enum class Correction { trace, random };

std::string to_string(Correction c);
Correction parse_correction(const std::string& text);

// A point estimate of prediction error together with the per-draw values it averages.
struct ErrorEstimate {
  std::string estimator;
  std::string model;
  std::string setting;
  double alpha = 0.0;
  int draws = 0; // B (or K for bags)
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  std::string correction;
  std::string refit;
  std::vector<double> per_draw;
  Flags flags;

  // value = mean(per_draw), std_error = sd(per_draw) / sqrt(B).
  static ErrorEstimate from_draws(std::string estimator, std::vector<double> per_draw);
};

// estimator,model,setting,alpha,B,value,se,seed
std::string estimate_csv_header();
std::string to_csv_row(const ErrorEstimate& e);

// Shortest round-trip decimal representation used in all CSV output.
std::string format_double(double v);

}  // namespace gencp
