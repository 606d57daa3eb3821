#include "gencp/simlab/ground_truth.hpp"

#include "gencp/parallel.hpp"
#include "gencp/rng.hpp"

namespace gencp {

GroundTruth ground_truth(const JointGaussianModel& joint, const Model& model, RefitMode refit, double alpha, int reps,
                         std::uint64_t seed, const QuadraticForm& theta, unsigned jobs) {
  require(reps >= 100, "ground_truth: reps must be >= 100");
  require(alpha >= 0.0, "ground_truth: alpha must be >= 0");
  require(theta.size() == joint.size(), "ground_truth: Theta dimension mismatch");
  std::vector<double> err(static_cast<std::size_t>(reps)), err_alpha(static_cast<std::size_t>(reps));
  const bool bagged = model.bag() != nullptr;
  const double root = std::sqrt(alpha);

  parallel_for(static_cast<std::size_t>(reps), jobs, [&](std::size_t r) {
    const JointSample s = sample_joint(joint, derive_seed(seed, Stream::truth, {r, 0}));
    const std::uint64_t model_seed = derive_seed(seed, Stream::model, {r});
    const Fit fit = model.fit(s.y, model_seed);
    err[r] = theta.norm2(s.y_star - fit.prediction);
    if (bagged) {
      err_alpha[r] = err[r];
      return;
    }
    Rng rng(derive_seed(seed, Stream::truth, {r, 1}));
    const Vector w = s.y + root * joint.response_sampler().draw(rng);
    const Fit fw = model.fit(w, model_seed, refit == RefitMode::y);
    err_alpha[r] = theta.norm2(s.y_star - (refit == RefitMode::y ? fw.smooth(s.y) : fw.prediction));
  });

  GroundTruth out;
  const MeanSe e = mean_se(err), ea = mean_se(err_alpha);
  out.err = e.mean;
  out.err_se = e.se;
  out.err_alpha = ea.mean;
  out.err_alpha_se = ea.se;
  out.alpha = alpha;
  out.refit = refit;
  out.reps = reps;
  return out;
}

GroundTruth ground_truth(const JointGaussianModel& joint, const Model& model, RefitMode refit, double alpha, int reps,
                         std::uint64_t seed) {
  return ground_truth(joint, model, refit, alpha, reps, seed, QuadraticForm::identity(joint.size()));
}

}  // namespace gencp
