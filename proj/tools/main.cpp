#include "gencp/fission/fission.hpp"
#include "gencp/simlab/config.hpp"
#include "gencp/simlab/cv_study.hpp"
#include "gencp/simlab/dataset.hpp"
#include "gencp/simlab/design.hpp"
#include "gencp/simlab/experiment.hpp"
#include "gencp/simlab/ground_truth.hpp"
#include "gencp/simlab/report.hpp"
#include "gencp/simlab/select.hpp"
#include "gencp/variogram/variogram.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <sstream>

using namespace gencp;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned jobs = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--out-dir", c.out_dir, "output directory (overrides the config)");
  app->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

Json load_config(const std::string& path, const Common& c) {
  Json j = read_json_file(path);
  if (c.seed) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    j["seed"] = *c.seed;
  }
  return j;
}

std::string out_dir(const Common& c, const std::string& configured) {
  return c.out_dir.empty() ? configured : c.out_dir;
}

int simulate(const std::string& path, const Common& c) {
  ExperimentConfig config = parse_experiment_config(load_config(path, c));
  const std::string dir = out_dir(c, config.output_dir);
  ExperimentResults results = run_experiment(config, c.jobs, &std::cerr);
  write_report(results, dir);
  std::size_t failed = 0;
  for (const ResultRow& r : results.rows) failed += r.ok() ? 0 : 1;
  std::cout << "wrote " << results.rows.size() << " rows to " << dir << "/results.csv";
  if (failed) std::cout << " (" << failed << " failed cells)";
  std::cout << "\n";
  return 0;
}

int ground_truth_cmd(const std::string& path, const Common& c) {
  ExperimentConfig config = parse_experiment_config(load_config(path, c));
  const std::string dir = out_dir(c, config.output_dir);
  const Design design = gen_design(config.design, config.seed);
  const Index n = design.locations.size();
  std::vector<std::pair<double, RefitMode>> targets;
  for (const EstimatorConfig& e : config.estimators)
    if (e.kind == "gc" && std::find(targets.begin(), targets.end(), std::make_pair(e.alpha, e.refit)) == targets.end())
      targets.emplace_back(e.alpha, e.refit);
  if (targets.empty()) targets.emplace_back(kDefaultAlpha, RefitMode::w);

  std::ostringstream os;
  os << "setting,split,model,alpha,refit,reps,err,err_se,err_alpha,err_alpha_se\n";
  for (std::size_t mi = 0; mi < config.noise.modes.size(); ++mi) {
    const NoiseMode mode = config.noise.modes[mi];
    const JointGaussianModel joint = simulation_joint(design, config.noise, mode);
    for (std::size_t si = 0; si < config.splits.size(); ++si) {
      const SplitConfig& split = config.splits[si];
      ModelContext ctx;
      ctx.x = design.x;
      ctx.noise = joint.response_sampler_ptr();
      QuadraticForm theta = QuadraticForm::identity(n);
      if (split.kind != "none") {
        const std::uint64_t split_seed = derive_seed(config.seed, Stream::split, {si});
        const TrainTest tt = split.kind == "random" ? random_split(n, split.p_train, split_seed)
                                                    : clustered_split(design.locations, split.p_train, split_seed);
        ctx.train = tt.train;
        theta = selector_quadratics(tt.train, n).prediction;
      }
      const double scale = 1.0 / theta.trace();
      for (std::size_t m = 0; m < config.models.size(); ++m) {
        const ModelPtr model = make_model(config.models[m], ctx);
        for (const auto& [alpha, refit] : targets) {
          const GroundTruth t = ground_truth(joint, *model, refit, alpha, config.truth_reps,
                                             derive_seed(config.seed, Stream::truth, {mi, si, m}), theta, c.jobs);
          os << to_string(mode) << "," << split.label() << "," << config.models[m].display_name() << ","
             << format_double(alpha) << "," << to_string(refit) << "," << t.reps << ","
             << format_double(t.err * scale) << "," << format_double(t.err_se * scale) << ","
             << format_double(t.err_alpha * scale) << "," << format_double(t.err_alpha_se * scale) << "\n";
        }
      }
    }
  }
  write_text_file(dir + "/ground_truth.csv", os.str());
  std::cout << "wrote " << dir << "/ground_truth.csv\n";
  return 0;
}

int variogram_cmd(const std::string& data_path, const Common& c, int bins, double max_lag, const std::string& model_json,
                  const std::string& mode_text) {
  const Dataset data = read_dataset_csv(data_path);
  ModelContext ctx;
  ctx.x = data.x;
  ModelSpec spec = parse_model_spec(Json::parse(model_json));
  const ModelPtr model = make_model(residual_model_spec(spec), ctx);
  const EstimatedCovariance est = sigma_from_residuals(data.locations, data.y, *model, parse_noise_mode(mode_text),
                                                       VariogramOptions{bins, max_lag, 1e-6}, c.seed.value_or(0));
  const std::string dir = out_dir(c, "out");
  write_text_file(dir + "/variogram.csv", est.variogram.to_csv());
  write_text_file(dir + "/variogram_fit.csv", est.fit.to_csv());
  std::cout << est.fit.spec.describe() << (est.fit.converged ? "" : " (not converged)")
            << (est.diagonal_fallback ? " [diagonal fallback]" : "") << "\n";
  return 0;
}

int cv_study_cmd(const std::string& path, const Common& c) {
  const CvStudyConfig config = parse_cv_study_config(load_config(path, c));
  const std::string dir = out_dir(c, config.output_dir);
  const auto results = run_cv_study(config);
  write_text_file(dir + "/cv_study.csv", cv_study_to_csv(results));
  if (config.mc_reps > 0) write_text_file(dir + "/trace_check.csv", trace_checks_to_csv(results));
  std::cout << cv_study_to_csv(results);
  return 0;
}

int select_cmd(const std::string& data_path, const std::string& path, const Common& c) {
  const SelectConfig config = parse_select_config(load_config(path, c));
  const std::string dir = out_dir(c, config.output_dir);
  const Dataset data = read_dataset_csv(data_path);
  const SelectionResult result = select_models(data, config, c.jobs);
  write_text_file(dir + "/selection.csv", selection_to_csv(result));
  write_text_file(dir + "/variogram.csv", result.covariance.variogram.to_csv());
  write_text_file(dir + "/variogram_fit.csv", result.covariance.fit.to_csv());
  std::cout << selection_to_csv(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Cp error estimation for spatial data"};
  app.require_subcommand(1);

  Common common;
  std::string config_path, data_path;

  auto* sim = app.add_subcommand("simulate", "run a Monte-Carlo experiment from a config");
  sim->add_option("config", config_path, "experiment config (JSON)")->required();
  add_common(sim, common);

  auto* gt = app.add_subcommand("ground-truth", "Monte-Carlo Err and Err_alpha for every model of a config");
  gt->add_option("config", config_path, "experiment config (JSON)")->required();
  add_common(gt, common);

  int bins = 15;
  double max_lag = 0.0;
  std::string model_json = R"({"kind":"ols"})";
  std::string mode = "ssn";
  auto* vg = app.add_subcommand("variogram", "fit a Matern variogram to model residuals of a dataset");
  vg->add_option("data", data_path, "dataset CSV")->required();
  vg->add_option("--bins", bins, "number of distance bins");
  vg->add_option("--max-lag", max_lag, "largest lag (default: half the largest distance)");
  vg->add_option("--model", model_json, "model spec used for the residuals (JSON)");
  vg->add_option("--mode", mode, "nsn or ssn");
  add_common(vg, common);

  auto* cvs = app.add_subcommand("cv-study", "correction-trace ratios of CV schemes against a target split");
  cvs->add_option("config", config_path, "cv study config (JSON)")->required();
  add_common(cvs, common);

  auto* sel = app.add_subcommand("select", "rank models on a dataset by GC with an estimated covariance");
  sel->add_option("data", data_path, "dataset CSV")->required();
  sel->add_option("config", config_path, "selection config (JSON)")->required();
  add_common(sel, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return simulate(config_path, common);
    if (*gt) return ground_truth_cmd(config_path, common);
    if (*vg) return variogram_cmd(data_path, common, bins, max_lag, model_json, mode);
    if (*cvs) return cv_study_cmd(config_path, common);
    if (*sel) return select_cmd(data_path, config_path, common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
