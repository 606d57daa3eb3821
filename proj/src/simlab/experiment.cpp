#include "gencp/simlab/experiment.hpp"

#include "gencp/cv/cv_error.hpp"
#include "gencp/estimators/classical.hpp"
#include "gencp/estimators/gc.hpp"
#include "gencp/parallel.hpp"
#include "gencp/rng.hpp"
#include "gencp/simlab/select.hpp"

#include <map>
#include <ostream>
#include <sstream>

namespace gencp {

std::string truth_key(const std::string& estimator, double alpha, const std::string& refit) {
  if (estimator == "err") return "err";
  return estimator + "|" + format_double(alpha) + "|" + refit;
}

std::string ResultRow::truth_key() const { return gencp::truth_key(estimator, alpha, refit); }

namespace {

struct TruthNeed {
  double alpha;
  RefitMode refit;
};

struct Setting {
  NoiseMode mode = NoiseMode::nsn;
  std::size_t mode_index = 0;
  SplitConfig split;
  std::size_t split_index = 0;
  std::shared_ptr<const JointGaussianModel> joint;
  ModelContext ctx;
  QuadraticForm theta;
  double theta_trace = 0.0;
  std::vector<ModelPtr> models;
  std::map<std::string, std::shared_ptr<const GcSetup>> setups; // flavor|alpha

  std::string label() const { return to_string(mode); }
};

std::string setup_key(bool indep, double alpha) { return (indep ? "indep|" : "corr|") + format_double(alpha); }

std::shared_ptr<const GcSetup> make_setup(const JointGaussianModel& joint, bool indep, double alpha,
                                          const QuadraticForm& theta) {
  if (indep) return std::make_shared<GcSetup>(GcSetup::independent(joint.cov(), joint.cov_star(), alpha, theta));
  return std::make_shared<GcSetup>(joint, alpha, theta);
}

std::vector<TruthNeed> truth_needs(const ExperimentConfig& config) {
  std::vector<TruthNeed> out;
  for (const EstimatorConfig& e : config.estimators) {
    if (e.kind != "gc") continue;
    bool seen = false;
    for (const TruthNeed& t : out) seen = seen || (t.alpha == e.alpha && t.refit == e.refit);
    if (!seen) out.push_back({e.alpha, e.refit});
  }
  return out;
}

class RepRunner {
 public:
  RepRunner(const ExperimentConfig& config, const Design& design, const Setting& setting, int rep)
      : config_(config), design_(design), st_(setting), rep_(rep) {}

  std::vector<ResultRow> run() {
    seed_ = derive_seed(config_.seed, Stream::data, {st_.mode_index, static_cast<std::uint64_t>(rep_)});
    sample_ = sample_joint(*st_.joint, seed_);
    for (std::size_t m = 0; m < st_.models.size(); ++m) run_model(m);
    return std::move(rows_);
  }

 private:
  std::uint64_t key(std::size_t m, std::uint64_t extra) const {
    return derive_seed(config_.seed, {st_.mode_index, st_.split_index, static_cast<std::uint64_t>(rep_), m, extra});
  }

  void add(const std::string& model, std::string estimator, std::string correction, std::string refit, double alpha,
           int draws, double value, double se, std::string target, std::string status = "ok") {
    ResultRow r;
    r.setting = st_.label();
    r.split = st_.split.label();
    r.rep = rep_;
    r.seed = seed_;
    r.model = model;
    r.estimator = std::move(estimator);
    r.correction = std::move(correction);
    r.refit = std::move(refit);
    r.alpha = alpha;
    r.draws = draws;
    r.value = value;
    r.std_error = se;
    r.target = std::move(target);
    r.status = std::move(status);
    rows_.push_back(std::move(r));
  }

  void add_estimate(const std::string& model, const ErrorEstimate& e, const std::string& suffix, const std::string& target) {
    add(model, e.estimator + suffix, e.correction, e.refit, e.alpha, e.draws, e.value / st_.theta_trace,
        e.std_error / st_.theta_trace, target);
  }

  void run_model(std::size_t m) {
    const Model& model = *st_.models[m];
    const ModelSpec& spec = config_.models[m];
    const std::string name = spec.display_name();
    const std::uint64_t model_seed = derive_seed(key(m, 0), Stream::model);
    const bool bagged = model.bag() != nullptr;
    const Vector& y = sample_.y;

    Fit fit_y;
    try {
      fit_y = model.fit(y, model_seed);
      add(name, "err", "", "", 0.0, 1, st_.theta.norm2(sample_.y_star - fit_y.prediction) / st_.theta_trace, 0.0, "");
    } catch (const std::exception& ex) {
      add(name, "err", "", "", 0.0, 1, std::nan(""), 0.0, "", std::string("error: ") + ex.what());
      return;
    }

    if (!bagged) {
      Rng rng(derive_seed(key(m, 1), Stream::truth));
      const Vector omega = st_.joint->response_sampler().draw(rng);
      for (const TruthNeed& t : truth_needs(config_)) {
        const std::string refit = to_string(t.refit);
        try {
          const Vector w = y + std::sqrt(t.alpha) * omega;
          const Fit fw = model.fit(w, model_seed, t.refit == RefitMode::y);
          const Vector pred = t.refit == RefitMode::y ? fw.smooth(y) : fw.prediction;
          add(name, "err_alpha", "", refit, t.alpha, 1, st_.theta.norm2(sample_.y_star - pred) / st_.theta_trace, 0.0,
              "");
        } catch (const std::exception& ex) {
          add(name, "err_alpha", "", refit, t.alpha, 1, std::nan(""), 0.0, "", std::string("error: ") + ex.what());
        }
      }
    }

    std::map<std::string, OptimismEstimates> optimism;
    for (std::size_t ei = 0; ei < config_.estimators.size(); ++ei) {
      const EstimatorConfig& e = config_.estimators[ei];
      try {
        run_estimator(m, ei, e, model, spec, name, model_seed, fit_y, optimism);
      } catch (const std::exception& ex) {
        add(name, e.label(), "", "", e.alpha, e.draws, std::nan(""), 0.0, "", std::string("error: ") + ex.what());
      }
    }
  }

  void run_estimator(std::size_t m, std::size_t ei, const EstimatorConfig& e, const Model& model, const ModelSpec& spec,
                     const std::string& name, std::uint64_t model_seed, const Fit& fit_y,
                     std::map<std::string, OptimismEstimates>& optimism) {
    const Vector& y = sample_.y;
    const Index n = y.size();
    const bool indep = e.flavor == "indep";
    if (e.kind == "gc") {
      const std::uint64_t draw_seed = derive_seed(key(m, 2 + ei), Stream::fission);
      if (e.covariance == "estimated") {
        run_gc_estimated(e, spec, name, model_seed, draw_seed);
        return;
      }
      if (const BagConfig* bag = model.bag()) {
        const GcSetup& setup = *st_.setups.at(setup_key(indep, bag->alpha));
        for (const ErrorEstimate& est : gc_bagged_estimate(model, y, setup, model_seed, e.corrections))
          add_estimate(name, est, "", "err");
        return;
      }
      const GcSetup& setup = *st_.setups.at(setup_key(indep, e.alpha));
      std::vector<GcVariant> variants;
      for (Correction c : e.corrections) variants.push_back({e.refit, c});
      for (const ErrorEstimate& est :
           gc_bootstrap(model, y, setup, st_.joint->response_sampler(), e.draws, draw_seed, variants))
        add_estimate(name, est, "", truth_key("err_alpha", e.alpha, to_string(e.refit)));
      return;
    }
    if (e.kind == "mallows") {
      if (model.adaptive() || !model.linear_smoother())
        throw std::invalid_argument("mallows needs a fixed linear smoother");
      const Fit f = model.fit(y, model_seed, true);
      add_estimate(name, mallows_cp(y, embed_smoother(f, n), st_.joint->cov(), st_.theta), "", "err");
      return;
    }
    if (e.kind == "efron" || e.kind == "by") {
      OptimismMode mode = OptimismMode::iid;
      if (e.mode == "ssn" || (e.mode == "auto" && st_.mode == NoiseMode::ssn)) mode = OptimismMode::ssn;
      const std::string k = format_double(e.alpha) + "|" + std::to_string(e.draws) + "|" +
                            (mode == OptimismMode::ssn ? "ssn" : "iid");
      auto it = optimism.find(k);
      if (it == optimism.end()) {
        const std::uint64_t seed = derive_seed(key(m, 1), Stream::bootstrap);
        it = optimism.emplace(k, efron_by_both(y, model, *st_.joint, e.alpha, e.draws, mode, seed, st_.theta)).first;
      }
      add_estimate(name, e.kind == "efron" ? it->second.efron : it->second.by, "", "err");
      return;
    }
    if (e.kind == "split") {
      if (st_.split.kind == "none") throw std::invalid_argument("split estimator needs a train/test split");
      add(name, "split", "", "", 0.0, 1, st_.theta.norm2(y - fit_y.prediction) / st_.theta_trace, 0.0, "err");
      return;
    }
    // cross-validation inside the training rows
    const IndexList rows = st_.ctx.fit_rows();
    const Locations sub(gather_rows(design_.locations.points(), rows));
    const std::uint64_t fold_seed = derive_seed(key(m, 2 + ei), Stream::cv_folds);
    SplitPlan plan;
    if (e.kind == "kfcv")
      plan = kfold_splits(sub.size(), e.folds, fold_seed);
    else if (e.kind == "spcv")
      plan = spatial_kmeans_splits(sub, e.folds, fold_seed);
    else
      plan = bloo_splits(sub, e.buffer);
    plan = plan.mapped(rows);
    const ModelContext& ctx = st_.ctx;
    ModelFactory factory = [&](const IndexList& est) {
      ModelContext c = ctx;
      c.train = est;
      return make_model(spec, c);
    };
    const CvEstimate cv = cv_mse(factory, plan, y, model_seed);
    add(name, e.kind, "", "", 0.0, static_cast<int>(plan.pairs.size()), cv.value, cv.std_error, "err");
  }

  void run_gc_estimated(const EstimatorConfig& e, const ModelSpec& spec, const std::string& name,
                        std::uint64_t model_seed, std::uint64_t draw_seed) {
    const bool indep = e.flavor == "indep";
    const bool bagged = spec.kind == "bagged";
    const ModelPtr residual_model = make_model(residual_model_spec(spec), st_.ctx);
    const EstimatedCovariance ec = sigma_from_residuals(design_.locations, sample_.y, *residual_model, st_.mode, {},
                                                        model_seed);
    ModelContext ctx = st_.ctx;
    ctx.noise = ec.joint->response_sampler_ptr();
    const ModelPtr model = make_model(spec, ctx);
    const double alpha = bagged ? spec.bag_alpha : e.alpha;
    const auto setup = make_setup(*ec.joint, indep, alpha, st_.theta);
    if (bagged) {
      for (const ErrorEstimate& est : gc_bagged_estimate(*model, sample_.y, *setup, model_seed, e.corrections))
        add_estimate(name, est, "_estcov", "err");
      return;
    }
    std::vector<GcVariant> variants;
    for (Correction c : e.corrections) variants.push_back({e.refit, c});
    for (const ErrorEstimate& est :
         gc_bootstrap(*model, sample_.y, *setup, ec.joint->response_sampler(), e.draws, draw_seed, variants))
      add_estimate(name, est, "_estcov", truth_key("err_alpha", e.alpha, to_string(e.refit)));
  }

  const ExperimentConfig& config_;
  const Design& design_;
  const Setting& st_;
  int rep_;
  std::uint64_t seed_ = 0;
  JointSample sample_;
  std::vector<ResultRow> rows_;
};

}  // namespace

ExperimentResults run_experiment(const ExperimentConfig& config, unsigned jobs, std::ostream* log) {
  ExperimentResults out;
  out.design = gen_design(config.design, config.seed);
  const Design& design = out.design;
  const Index n = design.locations.size();

  for (std::size_t mi = 0; mi < config.noise.modes.size(); ++mi) {
    const NoiseMode mode = config.noise.modes[mi];
    auto joint = std::make_shared<const JointGaussianModel>(simulation_joint(design, config.noise, mode));
    for (std::size_t si = 0; si < config.splits.size(); ++si) {
      Setting st;
      st.mode = mode;
      st.mode_index = mi;
      st.split = config.splits[si];
      st.split_index = si;
      st.joint = joint;
      st.ctx.x = design.x;
      st.ctx.noise = joint->response_sampler_ptr();
      if (st.split.kind == "none") {
        st.theta = QuadraticForm::identity(n);
      } else {
        const std::uint64_t split_seed = derive_seed(config.seed, Stream::split, {si});
        const TrainTest tt = st.split.kind == "random" ? random_split(n, st.split.p_train, split_seed)
                                                       : clustered_split(design.locations, st.split.p_train, split_seed);
        st.ctx.train = tt.train;
        st.theta = selector_quadratics(tt.train, n).prediction;
      }
      st.theta_trace = st.theta.trace();
      for (const ModelSpec& spec : config.models) st.models.push_back(make_model(spec, st.ctx));
      for (const EstimatorConfig& e : config.estimators) {
        if (e.kind != "gc" || e.covariance != "oracle") continue;
        const bool indep = e.flavor == "indep";
        std::vector<double> alphas{e.alpha};
        for (const ModelPtr& m : st.models)
          if (m->bag()) alphas.push_back(m->bag()->alpha);
        for (double a : alphas) {
          const std::string k = setup_key(indep, a);
          if (!st.setups.count(k)) st.setups.emplace(k, make_setup(*joint, indep, a, st.theta));
        }
      }

      if (log) *log << "setting " << st.label() << " / " << st.split.label() << ": " << config.reps << " reps\n";
      std::vector<std::vector<ResultRow>> per_rep(static_cast<std::size_t>(config.reps));
      parallel_for(per_rep.size(), jobs, [&](std::size_t r) {
        per_rep[r] = RepRunner(config, design, st, static_cast<int>(r)).run();
      });
      for (auto& rows : per_rep)
        for (auto& row : rows) out.rows.push_back(std::move(row));
    }
  }
  return out;
}

std::string results_to_csv(const ExperimentResults& results) {
  std::ostringstream os;
  os << "setting,split,rep,seed,model,estimator,correction,refit,alpha,B,value,se,target,status\n";
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c == '\n' ? ' ' : c;
    }
    return q + "\"";
  };
  for (const ResultRow& r : results.rows)
    os << r.setting << "," << quote(r.split) << "," << r.rep << "," << r.seed << "," << quote(r.model) << ","
       << quote(r.estimator) << "," << r.correction << "," << r.refit << "," << format_double(r.alpha) << ","
       << r.draws << "," << format_double(r.value) << "," << format_double(r.std_error) << "," << quote(r.target)
       << "," << quote(r.status) << "\n";
  return os.str();
}

}  // namespace gencp
