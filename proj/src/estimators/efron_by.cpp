#include "gencp/estimators/classical.hpp"

#include "gencp/rng.hpp"

namespace gencp {

std::string to_string(OptimismVariant v) { return v == OptimismVariant::efron ? "efron" : "by"; }

OptimismEstimates efron_by_both(const Vector& y, const Model& g, const JointGaussianModel& joint, double alpha,
                                int draws, OptimismMode mode, std::uint64_t seed, const QuadraticForm& theta) {
  require(alpha > 0.0 && alpha <= 1.0, "efron_by: alpha must lie in (0, 1]");
  require(draws >= 2, "efron_by: B must be >= 2");
  const Index n = joint.size();
  require(y.size() == n && theta.size() == n, "efron_by: dimension mismatch");
  const bool ssn = mode == OptimismMode::ssn;
  const double root = std::sqrt(alpha);

  Matrix ys(n, draws), ystar(ssn ? n : 0, ssn ? draws : 0), preds(n, draws);
  for (int b = 0; b < draws; ++b) {
    const auto key = static_cast<std::uint64_t>(b);
    Rng rng(derive_seed(seed, Stream::bootstrap, {key}));
    if (ssn) {
      Vector z = joint.stacked_sampler().draw(rng);
      ystar.col(b) = y + root * z.head(n);
      ys.col(b) = y + root * z.tail(n);
    } else {
      ys.col(b) = y + root * joint.response_sampler().draw(rng);
    }
    preds.col(b) = g.fit(ys.col(b), derive_seed(seed, Stream::model, {key})).prediction;
  }

  const Vector fitted = g.fit(y, derive_seed(seed, Stream::model, {~std::uint64_t{0}})).prediction;
  const double apparent = theta.norm2(y - fitted);
  const double traces = ssn ? theta.trace_with(joint.cov_star()) - theta.trace_with(joint.cov()) : 0.0;
  const Vector ybar = ys.rowwise().mean();
  const Vector ystar_bar = ssn ? Vector(ystar.rowwise().mean()) : Vector();
  const double inflate = static_cast<double>(draws) / static_cast<double>(draws - 1);

  // per-draw covariance contributions, scaled so their mean is cov - cov*
  std::vector<double> terms(static_cast<std::size_t>(draws));
  for (int b = 0; b < draws; ++b) {
    const Vector tg = theta.apply(preds.col(b));
    double t = tg.dot(ys.col(b) - ybar);
    if (ssn) t -= tg.dot(ystar.col(b) - ystar_bar);
    terms[static_cast<std::size_t>(b)] = inflate * t;
  }
  auto build = [&](const char* id, double scale) {
    std::vector<double> vals(terms.size());
    for (std::size_t b = 0; b < terms.size(); ++b) vals[b] = apparent + 2.0 * scale * terms[b] + traces;
    ErrorEstimate e = ErrorEstimate::from_draws(id, std::move(vals));
    e.model = g.name();
    e.alpha = alpha;
    e.seed = seed;
    e.correction = ssn ? "ssn" : "iid";
    return e;
  };
  return {build("efron", 1.0), build("by", 1.0 / alpha)};
}

ErrorEstimate efron_by(const Vector& y, const Model& g, const JointGaussianModel& joint, double alpha, int draws,
                       OptimismVariant variant, OptimismMode mode, std::uint64_t seed, const QuadraticForm& theta) {
  OptimismEstimates both = efron_by_both(y, g, joint, alpha, draws, mode, seed, theta);
  return variant == OptimismVariant::efron ? both.efron : both.by;
}

}  // namespace gencp
