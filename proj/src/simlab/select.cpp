#include "gencp/simlab/select.hpp"

#include "gencp/cv/cv_error.hpp"
#include "gencp/estimators/gc.hpp"
#include "gencp/parallel.hpp"
#include "gencp/rng.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace gencp {

ModelSpec residual_model_spec(const ModelSpec& spec) {
  if (spec.kind != "bagged") return spec;
  if (spec.base) return *spec.base;
  ModelSpec tree;
  tree.kind = "tree";
  tree.depth = spec.depth;
  return tree;
}

SelectionResult select_models(const Dataset& data, const SelectConfig& config, unsigned jobs) {
  data.validate();
  const Index n = data.size();
  SelectionResult out;

  ModelContext ctx;
  ctx.x = data.x;
  const ModelSpec cov_spec = residual_model_spec(config.covariance_model ? *config.covariance_model : config.models.front());
  const ModelPtr cov_model = make_model(cov_spec, ctx);
  out.covariance = sigma_from_residuals(data.locations, data.y, *cov_model, config.mode,
                                        VariogramOptions{config.n_bins, 0.0, 1e-6},
                                        derive_seed(config.seed, Stream::model));
  const JointGaussianModel& joint = *out.covariance.joint;
  ctx.noise = joint.response_sampler_ptr();
  const QuadraticForm theta = QuadraticForm::identity(n);
  const double scale = 1.0 / static_cast<double>(n);

  const std::uint64_t model_seed = derive_seed(config.seed, Stream::model, {1});
  const std::uint64_t draw_seed = derive_seed(config.seed, Stream::fission);
  const SplitPlan kfold = kfold_splits(n, config.folds, derive_seed(config.seed, Stream::cv_folds, {0}));
  const SplitPlan spatial =
      spatial_kmeans_splits(data.locations, config.folds, derive_seed(config.seed, Stream::cv_folds, {1}));

  out.rows.resize(config.models.size());
  parallel_for(config.models.size(), jobs, [&](std::size_t m) {
    const ModelSpec& spec = config.models[m];
    SelectionRow& row = out.rows[m];
    row.model = spec.display_name();
    try {
      const ModelPtr model = make_model(spec, ctx);
      ErrorEstimate gc;
      if (const BagConfig* bag = model->bag()) {
        const GcSetup setup(joint, bag->alpha, theta);
        gc = gc_bagged_estimate(*model, data.y, setup, model_seed, {config.correction}).front();
      } else {
        const GcSetup setup(joint, config.alpha, theta);
        gc = gc_bootstrap(*model, data.y, setup, joint.response_sampler(), config.draws, draw_seed,
                          {GcVariant{RefitMode::w, config.correction}})
                 .front();
      }
      row.gc = gc.value * scale;
      row.gc_se = gc.std_error * scale;
      ModelFactory factory = [&](const IndexList& est) {
        ModelContext c = ctx;
        c.train = est;
        return make_model(spec, c);
      };
      const CvEstimate kf = cv_mse(factory, kfold, data.y, model_seed);
      row.kfcv = kf.value;
      row.kfcv_se = kf.std_error;
      const CvEstimate sp = cv_mse(factory, spatial, data.y, model_seed);
      row.spcv = sp.value;
      row.spcv_se = sp.std_error;
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  });

  std::vector<std::size_t> order;
  for (std::size_t m = 0; m < out.rows.size(); ++m)
    if (std::isfinite(out.rows[m].gc)) order.push_back(m);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.rows[a].gc < out.rows[b].gc; });
  for (std::size_t r = 0; r < order.size(); ++r) out.rows[order[r]].rank = static_cast<int>(r + 1);
  return out;
}

std::string selection_to_csv(const SelectionResult& result) {
  std::ostringstream os;
  os << "model,gc,gc_se,kfcv,kfcv_se,spcv,spcv_se,rank,status\n";
  auto field = [](const std::string& s) {
    return s.find_first_of(",\"") == std::string::npos ? s : "\"" + s + "\"";
  };
  for (const SelectionRow& r : result.rows)
    os << field(r.model) << "," << format_double(r.gc) << "," << format_double(r.gc_se) << ","
       << format_double(r.kfcv) << "," << format_double(r.kfcv_se) << "," << format_double(r.spcv) << ","
       << format_double(r.spcv_se) << "," << r.rank << "," << field(r.status) << "\n";
  return os.str();
}

FieldFixture synthetic_field(Index n, Index p, std::uint64_t seed, double extent) {
  require(n >= 10 && p >= 3, "synthetic_field: need n >= 10 and p >= 3");
  Rng rng(derive_seed(seed, Stream::design, {0}));
  Matrix pts(n, 2);
  for (Index i = 0; i < n; ++i) {
    pts(i, 0) = uniform(rng, 0.0, extent);
    pts(i, 1) = uniform(rng, 0.0, extent);
  }
  Locations loc(pts);
  const Matrix dist = loc.distances();
  const MaternSpec kernel{0.0, 1.0, 0.5, extent / 10.0};
  Matrix x = Matrix::Zero(n, p);
  const Index spikes = std::min<Index>(n, static_cast<Index>(std::ceil(2.0 * std::log(static_cast<double>(n)))));
  for (Index j = 0; j < p; ++j)
    for (Index k = 0; k < spikes; ++k) {
      const Index at = uniform_index(rng, n);
      const double a = uniform(rng, 1.0, 3.0) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      for (Index i = 0; i < n; ++i) x(i, j) += a * matern_cov(dist(i, at), kernel);
    }
  Vector mean(n);
  for (Index i = 0; i < n; ++i)
    mean(i) = 2.0 * std::tanh(x(i, 0)) + x(i, 1) * x(i, 2) + (x(i, 0) > 0.5 ? 1.0 : -0.5);
  const MaternSpec structured{0.0, 1.0, 1.5, extent / 5.0};
  auto joint = std::make_shared<const JointGaussianModel>(
      make_joint(NoiseMode::ssn, build_sigma(loc, structured, true), 0.75, mean, 1.0));
  const JointSample s = sample_joint(*joint, derive_seed(seed, Stream::data));

  FieldFixture f;
  f.data.locations = loc;
  f.data.x = x;
  f.data.y = s.y;
  f.data.y_star = s.y_star;
  f.data.source = "synthetic_field(seed=" + std::to_string(seed) + ")";
  f.joint = joint;
  return f;
}

}  // namespace gencp
