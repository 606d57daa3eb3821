#include "gencp/estimators/estimate.hpp"

#include <charconv>
#include <cmath>

namespace gencp {

std::string to_string(Correction c) { return c == Correction::trace ? "trace" : "random"; }

Correction parse_correction(const std::string& text) {
  if (text == "trace") return Correction::trace;
  if (text == "random") return Correction::random;
  throw ConfigError("unknown correction '" + text + "' (expected trace or random)");
}

ErrorEstimate ErrorEstimate::from_draws(std::string estimator, std::vector<double> per_draw) {
  ErrorEstimate e;
  e.estimator = std::move(estimator);
  MeanSe ms = mean_se(per_draw);
  e.value = ms.mean;
  e.std_error = ms.se;
  e.draws = static_cast<int>(per_draw.size());
  e.per_draw = std::move(per_draw);
  return e;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string estimate_csv_header() { return "estimator,model,setting,alpha,B,value,se,seed"; }

std::string to_csv_row(const ErrorEstimate& e) {
  return e.estimator + "," + e.model + "," + e.setting + "," + format_double(e.alpha) + "," + std::to_string(e.draws) +
         "," + format_double(e.value) + "," + format_double(e.std_error) + "," + std::to_string(e.seed);
}

}  // namespace gencp
