#include "gencp/simlab/cv_study.hpp"

#include "gencp/estimators/estimate.hpp"
#include "gencp/rng.hpp"
#include "gencp/simlab/design.hpp"

#include <Eigen/SVD>

#include <sstream>

namespace gencp {

CvScheme parse_cv_scheme(const Json& j) {
  CvScheme s;
  if (j.is_string()) {
    s.kind = j.get<std::string>();
  } else {
    if (!j.is_object()) throw ConfigError("scheme: expected a string or an object");
    for (const auto& item : j.items()) {
      try {
        if (item.key() == "kind")
          s.kind = item.value().get<std::string>();
        else if (item.key() == "k")
          s.k = item.value().get<int>();
        else if (item.key() == "buffer")
          s.buffer_radius = item.value().get<double>();
        else
          throw ConfigError("scheme: unknown key '" + item.key() + "'");
      } catch (const Json::exception& e) {
        throw ConfigError("scheme." + item.key() + ": " + e.what());
      }
    }
  }
  if (s.kind != "kfold" && s.kind != "spatial" && s.kind != "bloo" && s.kind != "target")
    throw ConfigError("scheme: unknown kind '" + s.kind + "'");
  if (s.k < 2) throw ConfigError("scheme: k must be >= 2");
  if (s.buffer_radius < 0.0) throw ConfigError("scheme: buffer must be >= 0");
  return s;
}

TraceCheck mc_trace_check(const Matrix& x, const Vector& mean, const GaussianSampler& noise, const IndexList& est,
                          const IndexList& pred, int reps, std::uint64_t seed) {
  require(reps >= 2, "mc_trace_check: reps must be >= 2");
  Matrix sigma = noise.factor() * noise.factor().transpose();
  TraceCheck out;
  out.trace = ols_correction_trace(x, sigma, est, pred);
  out.reps = reps;
  const Matrix xe = gather_rows(x, est), xp = gather_rows(x, pred);
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xe);
  std::vector<double> errs(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    Rng rng(derive_seed(seed, Stream::truth, {static_cast<std::uint64_t>(r)}));
    const Vector y = mean + noise.draw(rng);
    const Vector beta = cod.solve(gather(y, est));
    errs[static_cast<std::size_t>(r)] = (gather(y, pred) - xp * beta).squaredNorm();
  }
  const MeanSe ms = mean_se(errs);
  out.mc_mean = ms.mean;
  out.mc_se = ms.se;
  return out;
}

std::vector<CvStudyResult> run_cv_study(const CvStudyConfig& config) {
  const Design design = gen_design(config.design, config.seed);
  const JointGaussianModel joint = simulation_joint(design, config.noise, NoiseMode::nsn);
  std::vector<CvScheme> schemes;
  for (const Json& j : config.schemes) schemes.push_back(parse_cv_scheme(j));
  if (schemes.empty()) schemes = {CvScheme{"kfold"}, CvScheme{"spatial"}, CvScheme{"bloo"}, CvScheme{"target"}};

  std::vector<CvStudyResult> out;
  for (std::size_t t = 0; t < config.targets.size(); ++t) {
    CvBiasStudy study;
    study.locations = &design.locations;
    study.x = &design.x;
    study.sigma_y = &joint.cov();
    study.target = config.targets[t];
    study.p_tr = config.p_train;
    study.reps = config.reps;
    study.seed = derive_seed(config.seed, Stream::cv_folds, {t});
    CvStudyResult res;
    res.target = study.target;
    res.rows = cv_bias_study(schemes, study);
    if (config.mc_reps > 0) {
      const std::uint64_t split_seed = derive_seed(study.seed, Stream::split, {0});
      const TrainTest tt = study.target == "clustered" ? clustered_split(design.locations, study.p_tr, split_seed)
                                                       : random_split(design.locations.size(), study.p_tr, split_seed);
      res.check = mc_trace_check(design.x, design.mean, joint.response_sampler(), tt.train, tt.test, config.mc_reps,
                                 derive_seed(config.seed, Stream::truth, {t}));
    }
    out.push_back(std::move(res));
  }
  return out;
}

std::string cv_study_to_csv(const std::vector<CvStudyResult>& results) {
  std::ostringstream os;
  os << "target,scheme,mean_ratio,se,reps,dropped\n";
  for (const CvStudyResult& r : results)
    for (const CvBiasRow& row : r.rows)
      os << r.target << "," << row.scheme << "," << format_double(row.mean_ratio) << ","
         << format_double(row.std_error) << "," << row.reps << "," << row.dropped << "\n";
  return os.str();
}

std::string trace_checks_to_csv(const std::vector<CvStudyResult>& results) {
  std::ostringstream os;
  os << "target,trace,mc_mean,mc_se,reps\n";
  for (const CvStudyResult& r : results)
    if (r.check)
      os << r.target << "," << format_double(r.check->trace) << "," << format_double(r.check->mc_mean) << ","
         << format_double(r.check->mc_se) << "," << r.check->reps << "\n";
  return os.str();
}

}  // namespace gencp
