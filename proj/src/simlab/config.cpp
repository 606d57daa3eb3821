#include "gencp/simlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace gencp {

namespace {

// Reads keys from one JSON object and rejects anything it was not asked about.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  bool get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return false;
    try {
      out = j_.at(key).get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
    return true;
  }

  const Json* sub(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

template <class T, class F>
std::vector<T> parse_list(const Json* j, const std::string& where, F&& parse_one) {
  std::vector<T> out;
  if (!j) return out;
  check(j->is_array(), where + ": expected a list");
  for (const Json& item : *j) out.push_back(parse_one(item));
  return out;
}

std::vector<NoiseMode> parse_modes(const Json& j) {
  std::vector<NoiseMode> out;
  auto one = [&](const Json& v) {
    check(v.is_string(), "noise.mode: expected \"nsn\" or \"ssn\"");
    try {
      out.push_back(parse_noise_mode(v.get<std::string>()));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("noise.mode: ") + e.what());
    }
  };
  if (j.is_array())
    for (const Json& v : j) one(v);
  else
    one(j);
  check(!out.empty(), "noise.mode: empty list");
  return out;
}

std::uint64_t parse_seed(Reader& r) {
  std::uint64_t seed = 0;
  if (!r.get("seed", seed)) throw ConfigError("config: 'seed' is mandatory");
  return seed;
}

}  // namespace

std::string SplitConfig::label() const {
  if (kind == "none") return "insample";
  std::ostringstream os;
  os << kind << "(" << p_train << ")";
  return os.str();
}

std::string EstimatorConfig::label() const {
  std::ostringstream os;
  os << kind;
  if (kind == "gc") {
    os << "[" << flavor << ",refit=" << to_string(refit);
    if (covariance != "oracle") os << ",cov=" << covariance;
    os << "]";
  } else if (kind == "efron" || kind == "by") {
    os << "[" << mode << "]";
  } else if (kind == "kfcv" || kind == "spcv") {
    os << "(k=" << folds << ")";
  } else if (kind == "bloocv") {
    os << "(r=" << buffer << ")";
  }
  return os.str();
}

MaternSpec parse_matern(const Json& j) {
  Reader r(j, "matern");
  MaternSpec spec;
  r.get("nugget", spec.nugget);
  r.get("sill", spec.sill);
  r.get("smoothness", spec.smoothness);
  r.get("range", spec.range);
  r.finish();
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("matern: ") + e.what());
  }
  return spec;
}

Json matern_to_json(const MaternSpec& spec) {
  return Json{{"nugget", spec.nugget}, {"sill", spec.sill}, {"smoothness", spec.smoothness}, {"range", spec.range}};
}

ModelSpec parse_model_spec(const Json& j) {
  if (j.is_string()) {
    ModelSpec spec;
    spec.kind = j.get<std::string>();
    return spec;
  }
  Reader r(j, "model");
  ModelSpec spec;
  check(r.get("kind", spec.kind), "model: 'kind' is required");
  r.get("label", spec.label);
  r.get("depth", spec.depth);
  r.get("lambda", spec.lambda);
  r.get("l1_ratio", spec.l1_ratio);
  r.get("intercept", spec.intercept);
  r.get("grid", spec.grid);
  r.get("folds", spec.folds);
  r.get("seed", spec.seed);
  r.get("bag_size", spec.bag_size);
  r.get("bag_alpha", spec.bag_alpha);
  std::string refit;
  if (r.get("bag_refit", refit)) spec.bag_refit = parse_refit_mode(refit);
  if (const Json* base = r.sub("base")) spec.base = std::make_shared<ModelSpec>(parse_model_spec(*base));
  r.finish();
  static const std::set<std::string> kinds{"zero",     "ols",      "ridge",   "tree",   "relaxed_lasso", "lasso",
                                           "ridge_cv", "lasso_cv", "enet_cv", "bagged", "np_bagged"};
  check(kinds.count(spec.kind) > 0, "model: unknown kind '" + spec.kind + "'");
  check(spec.depth >= 0, "model: depth must be >= 0");
  check(spec.lambda >= 0.0, "model: lambda must be >= 0");
  check(spec.folds >= 2, "model: folds must be >= 2");
  check(spec.bag_size >= 1, "model: bag_size must be >= 1");
  check(spec.bag_alpha > 0.0, "model: bag_alpha must be > 0");
  return spec;
}

EstimatorConfig parse_estimator(const Json& j) {
  EstimatorConfig e;
  if (j.is_string()) {
    e.kind = j.get<std::string>();
  } else {
    Reader r(j, "estimator");
    check(r.get("kind", e.kind), "estimator: 'kind' is required");
    r.get("alpha", e.alpha);
    r.get("draws", e.draws);
    if (const Json* c = r.sub("correction")) {
      e.corrections.clear();
      auto one = [&](const Json& v) {
        check(v.is_string(), "estimator.correction: expected a string");
        try {
          e.corrections.push_back(parse_correction(v.get<std::string>()));
        } catch (const std::exception& ex) {
          throw ConfigError(std::string("estimator.correction: ") + ex.what());
        }
      };
      if (c->is_array())
        for (const Json& v : *c) one(v);
      else
        one(*c);
    }
    std::string refit;
    if (r.get("refit", refit)) e.refit = parse_refit_mode(refit);
    r.get("flavor", e.flavor);
    r.get("covariance", e.covariance);
    r.get("mode", e.mode);
    r.get("folds", e.folds);
    r.get("buffer", e.buffer);
    r.finish();
  }
  static const std::set<std::string> kinds{"gc", "mallows", "efron", "by", "kfcv", "spcv", "bloocv", "split"};
  check(kinds.count(e.kind) > 0, "estimator: unknown kind '" + e.kind + "'");
  check(e.alpha > 0.0, "estimator: alpha must be > 0");
  check(e.draws >= 2, "estimator: draws must be >= 2");
  check(!e.corrections.empty(), "estimator: at least one correction is needed");
  check(e.flavor == "auto" || e.flavor == "corr" || e.flavor == "indep", "estimator: flavor must be auto|corr|indep");
  check(e.covariance == "oracle" || e.covariance == "estimated", "estimator: covariance must be oracle|estimated");
  check(e.mode == "auto" || e.mode == "iid" || e.mode == "ssn", "estimator: mode must be auto|iid|ssn");
  check(e.folds >= 2, "estimator: folds must be >= 2");
  check(e.buffer >= 0.0, "estimator: buffer must be >= 0");
  return e;
}

DesignConfig parse_design(const Json& j) {
  Reader r(j, "design");
  DesignConfig d;
  r.get("mean", d.mean);
  r.get("n", d.n);
  r.get("p", d.p);
  r.get("s", d.s);
  r.get("extent", d.extent);
  if (const Json* m = r.sub("smoothing")) d.smoothing = parse_matern(*m);
  r.finish();
  check(d.mean == "linear" || d.mean == "friedman", "design.mean must be linear|friedman");
  check(d.n >= 4, "design.n must be >= 4");
  check(d.p >= 1, "design.p must be >= 1");
  check(d.s >= 0 && d.s <= d.p, "design.s must lie in [0, p]");
  check(d.mean != "friedman" || d.p >= 5, "design: the friedman mean needs p >= 5");
  check(d.extent >= 0.0, "design.extent must be >= 0");
  return d;
}

NoiseConfig parse_noise(const Json& j) {
  Reader r(j, "noise");
  NoiseConfig c;
  if (const Json* m = r.sub("mode")) c.modes = parse_modes(*m);
  r.get("delta", c.delta);
  r.get("snr", c.snr);
  if (const Json* s = r.sub("structured")) c.structured = parse_matern(*s);
  r.finish();
  check(c.delta >= 0.0 && c.delta <= 1.0, "noise.delta must lie in [0, 1]");
  check(c.snr > 0.0, "noise.snr must be > 0");
  return c;
}

ExperimentConfig parse_experiment_config(const Json& j) {
  Reader r(j, "config");
  ExperimentConfig c;
  c.seed = parse_seed(r);
  r.get("output_dir", c.output_dir);
  if (const Json* d = r.sub("design")) c.design = parse_design(*d);
  if (const Json* n = r.sub("noise")) c.noise = parse_noise(*n);
  c.models = parse_list<ModelSpec>(r.sub("models"), "models", parse_model_spec);
  c.estimators = parse_list<EstimatorConfig>(r.sub("estimators"), "estimators", parse_estimator);
  if (const Json* s = r.sub("splits")) {
    c.splits = parse_list<SplitConfig>(s, "splits", [](const Json& v) {
      SplitConfig sc;
      if (v.is_string()) {
        sc.kind = v.get<std::string>();
      } else {
        Reader sr(v, "split");
        sr.get("kind", sc.kind);
        sr.get("p_train", sc.p_train);
        sr.finish();
      }
      check(sc.kind == "none" || sc.kind == "random" || sc.kind == "clustered",
            "split.kind must be none|random|clustered");
      check(sc.p_train > 0.0 && sc.p_train < 1.0, "split.p_train must lie in (0, 1)");
      return sc;
    });
    check(!c.splits.empty(), "splits: empty list");
  }
  r.get("reps", c.reps);
  r.get("truth_reps", c.truth_reps);
  r.finish();
  check(!c.models.empty(), "config: at least one model is required");
  check(c.reps >= 1, "config: reps must be >= 1");
  check(c.truth_reps >= 100, "config: truth_reps must be >= 100");
  return c;
}

CvStudyConfig parse_cv_study_config(const Json& j) {
  Reader r(j, "config");
  CvStudyConfig c;
  c.seed = parse_seed(r);
  r.get("output_dir", c.output_dir);
  if (const Json* d = r.sub("design")) c.design = parse_design(*d);
  if (const Json* n = r.sub("noise")) c.noise = parse_noise(*n);
  r.get("targets", c.targets);
  r.get("p_train", c.p_train);
  if (const Json* s = r.sub("schemes")) {
    check(s->is_array(), "schemes: expected a list");
    for (const Json& v : *s) c.schemes.push_back(v);
  }
  r.get("reps", c.reps);
  r.get("mc_reps", c.mc_reps);
  r.finish();
  for (const auto& t : c.targets) check(t == "random" || t == "clustered", "targets: expected random|clustered");
  check(c.p_train > 0.0 && c.p_train < 1.0, "p_train must lie in (0, 1)");
  check(c.reps >= 1, "reps must be >= 1");
  check(c.mc_reps >= 0, "mc_reps must be >= 0");
  return c;
}

SelectConfig parse_select_config(const Json& j) {
  Reader r(j, "config");
  SelectConfig c;
  c.seed = parse_seed(r);
  r.get("output_dir", c.output_dir);
  c.models = parse_list<ModelSpec>(r.sub("models"), "models", parse_model_spec);
  std::string mode;
  if (r.get("mode", mode)) c.mode = parse_modes(Json(mode)).front();
  r.get("alpha", c.alpha);
  r.get("draws", c.draws);
  std::string corr;
  if (r.get("correction", corr)) {
    try {
      c.correction = parse_correction(corr);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("correction: ") + e.what());
    }
  }
  r.get("folds", c.folds);
  r.get("n_bins", c.n_bins);
  if (const Json* m = r.sub("covariance_model")) c.covariance_model = parse_model_spec(*m);
  r.finish();
  check(!c.models.empty(), "select: at least one model is required");
  check(c.alpha > 0.0, "select: alpha must be > 0");
  check(c.draws >= 2, "select: draws must be >= 2");
  check(c.folds >= 2, "select: folds must be >= 2");
  check(c.n_bins >= 4, "select: n_bins must be >= 4");
  return c;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace gencp
