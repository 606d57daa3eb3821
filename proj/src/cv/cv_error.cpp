#include "gencp/cv/cv_error.hpp"

#include "gencp/rng.hpp"

#include <Eigen/SVD>

#include <limits>
#include <sstream>

namespace gencp {

CvEstimate cv_mse(const ModelFactory& factory, const SplitPlan& plan, const Vector& y, std::uint64_t seed) {
  require(!plan.pairs.empty(), "cv_mse: empty split plan");
  CvEstimate out;
  for (std::size_t f = 0; f < plan.pairs.size(); ++f) {
    const SplitPair& pair = plan.pairs[f];
    require(!pair.pred.empty(), "cv_mse: empty prediction fold");
    try {
      ModelPtr model = factory(pair.est);
      Fit fit = model->fit(y, derive_seed(seed, Stream::cv_folds, {static_cast<std::uint64_t>(f)}));
      double sse = 0.0;
      for (Index i : pair.pred) sse += (y(i) - fit.prediction(i)) * (y(i) - fit.prediction(i));
      out.per_fold.push_back(sse / static_cast<double>(pair.pred.size()));
    } catch (const NumericalError& e) {
      throw NumericalError("cv fold " + std::to_string(f) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("cv fold " + std::to_string(f) + ": " + e.what());
    }
  }
  MeanSe ms = mean_se(out.per_fold);
  out.value = ms.mean;
  out.std_error = ms.se;
  return out;
}

double correction_trace(const Matrix& s, const Matrix& sigma_y, const Vector& theta_diag) {
  const Index n = sigma_y.rows();
  require(s.rows() == n && s.cols() == n && sigma_y.cols() == n && theta_diag.size() == n,
          "correction_trace: dimension mismatch");
  const Matrix ss = s * sigma_y;
  double out = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (theta_diag(i) == 0.0) continue;
    out += theta_diag(i) * (ss.row(i).dot(s.row(i)) + sigma_y(i, i) - 2.0 * ss(i, i));
  }
  return out;
}

double ols_correction_trace(const Matrix& x, const Matrix& sigma_y, const IndexList& est, const IndexList& pred) {
  require(!est.empty() && !pred.empty(), "ols_correction_trace: empty E or P");
  const Matrix xe = gather_rows(x, est), xp = gather_rows(x, pred);
  Eigen::BDCSVD<Matrix> svd(xe, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& d = svd.singularValues();
  const double tol = static_cast<double>(std::max(xe.rows(), xe.cols())) * std::numeric_limits<double>::epsilon() *
                     std::max(d.size() ? d(0) : 0.0, 1e-300);
  Index r = 0;
  while (r < d.size() && d(r) > tol) ++r;
  const Matrix u = svd.matrixU().leftCols(r);
  // S_PE = B U^T with B = X_P V D^{-1}
  const Matrix b = xp * svd.matrixV().leftCols(r) * d.head(r).cwiseInverse().asDiagonal();

  const auto ne = static_cast<Index>(est.size()), np = static_cast<Index>(pred.size());
  Matrix s_ee(ne, ne), s_pe(np, ne);
  for (Index j = 0; j < ne; ++j) {
    for (Index i = 0; i < ne; ++i) s_ee(i, j) = sigma_y(est[static_cast<std::size_t>(i)], est[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < np; ++i) s_pe(i, j) = sigma_y(pred[static_cast<std::size_t>(i)], est[static_cast<std::size_t>(j)]);
  }
  const Matrix c = u.transpose() * s_ee * u;
  const double t1 = (b * c).cwiseProduct(b).sum();
  double t2 = 0.0;
  for (Index i : pred) t2 += sigma_y(i, i);
  const double t3 = b.cwiseProduct(s_pe * u).sum();
  return t1 + t2 - 2.0 * t3;
}

std::string CvScheme::label() const {
  if (kind == "bloo") {
    std::ostringstream os;
    os << "bloo(r=" << buffer_radius << ")";
    return os.str();
  }
  if (kind == "kfold" || kind == "spatial") return kind + "(k=" + std::to_string(k) + ")";
  return kind;
}

std::vector<CvBiasRow> cv_bias_study(const std::vector<CvScheme>& schemes, const CvBiasStudy& study) {
  require(study.locations && study.x && study.sigma_y, "cv_bias_study: design not set");
  require(study.reps >= 1, "cv_bias_study: reps must be >= 1");
  const Locations& loc = *study.locations;
  const Index n = loc.size();
  require(study.x->rows() == n && study.sigma_y->rows() == n, "cv_bias_study: dimension mismatch");
  for (const CvScheme& s : schemes)
    if (s.kind != "kfold" && s.kind != "spatial" && s.kind != "bloo" && s.kind != "target")
      throw ConfigError("unknown cv scheme '" + s.kind + "'");

  std::vector<std::vector<double>> ratios(schemes.size());
  std::vector<int> dropped(schemes.size(), 0);
  for (int r = 0; r < study.reps; ++r) {
    const auto rep = static_cast<std::uint64_t>(r);
    const std::uint64_t split_seed = derive_seed(study.seed, Stream::split, {rep});
    TrainTest tt = study.target == "clustered" ? clustered_split(loc, study.p_tr, split_seed)
                                               : random_split(n, study.p_tr, split_seed);
    const double target = ols_correction_trace(*study.x, *study.sigma_y, tt.train, tt.test) /
                          static_cast<double>(tt.test.size());
    const Locations sub(gather_rows(loc.points(), tt.train));
    Rng rng(derive_seed(study.seed, Stream::cv_folds, {rep}));
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      const CvScheme& scheme = schemes[s];
      if (scheme.kind == "target") {
        ratios[s].push_back(target / target);
        continue;
      }
      SplitPlan plan;
      const std::uint64_t plan_seed = derive_seed(study.seed, Stream::cv_folds, {rep, s});
      if (scheme.kind == "kfold")
        plan = kfold_splits(sub.size(), scheme.k, plan_seed);
      else if (scheme.kind == "spatial")
        plan = spatial_kmeans_splits(sub, scheme.k, plan_seed);
      else
        plan = bloo_splits(sub, scheme.buffer_radius);
      dropped[s] += plan.dropped;
      if (plan.pairs.empty()) continue;
      const SplitPair pair = plan.mapped(tt.train).pairs[static_cast<std::size_t>(
          uniform_index(rng, static_cast<Index>(plan.pairs.size())))];
      const double t = ols_correction_trace(*study.x, *study.sigma_y, pair.est, pair.pred) /
                       static_cast<double>(pair.pred.size());
      ratios[s].push_back(t / target);
    }
  }
  std::vector<CvBiasRow> out;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    MeanSe ms = mean_se(ratios[s]);
    out.push_back({schemes[s].label(), ms.mean, ms.se, static_cast<int>(ratios[s].size()), dropped[s]});
  }
  return out;
}

}  // namespace gencp
