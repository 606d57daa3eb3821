#pragma once

#include "gencp/cv/cv_error.hpp"
#include "gencp/simlab/config.hpp"

namespace gencp {

CvScheme parse_cv_scheme(const Json& j);

// MC check of the OLS correction trace: y ~ N(X beta, Sigma_Y), OLS (no intercept) on E,
// squared error summed over P.
struct TraceCheck {
  double trace = 0.0;
  double mc_mean = 0.0;
  double mc_se = 0.0;
  int reps = 0;
};

TraceCheck mc_trace_check(const Matrix& x, const Vector& mean, const GaussianSampler& noise, const IndexList& est,
                          const IndexList& pred, int reps, std::uint64_t seed);

struct CvStudyResult {
  std::string target;
  std::vector<CvBiasRow> rows;
  std::optional<TraceCheck> check; // on the first target split when mc_reps > 0
};

std::vector<CvStudyResult> run_cv_study(const CvStudyConfig& config);

// target,scheme,mean_ratio,se,reps,dropped
std::string cv_study_to_csv(const std::vector<CvStudyResult>& results);
// target,trace,mc_mean,mc_se,reps
std::string trace_checks_to_csv(const std::vector<CvStudyResult>& results);

}  // namespace gencp
