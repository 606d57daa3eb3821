#include "gencp/estimators/gc.hpp"

#include "gencp/rng.hpp"

namespace gencp {

GcSetup::GcSetup(const JointGaussianModel& joint, double alpha, QuadraticForm theta) {
  require(theta.size() == joint.size(), "GcSetup: Theta dimension mismatch");
  if (joint.independent()) {
    *this = independent(joint.cov(), joint.cov_star(), alpha, std::move(theta));
    return;
  }
  RegressionDecomposition d = decompose(joint, alpha);
  alpha_ = alpha;
  theta_ = std::move(theta);
  sigma_y_ = joint.cov();
  gamma_ = std::move(d.gamma);
  gamma_w_ = std::move(d.gamma_w);
  finish(d.sigma_n, d.sigma_n_star, d.sigma_i_gamma_y, d.sigma_i_gamma_w_y);
}

GcSetup GcSetup::independent(const Matrix& sigma_y, const Matrix& sigma_y_star, double alpha, QuadraticForm theta) {
  require(alpha > 0.0 && std::isfinite(alpha), "GcSetup: alpha must be > 0");
  require(sigma_y.rows() == sigma_y.cols() && sigma_y_star.rows() == sigma_y.rows() &&
              sigma_y_star.cols() == sigma_y.rows(),
          "GcSetup: covariance dimension mismatch");
  require(theta.size() == sigma_y.rows(), "GcSetup: Theta dimension mismatch");
  GcSetup s;
  s.alpha_ = alpha;
  s.theta_ = std::move(theta);
  s.sigma_y_ = sigma_y;
  s.finish(sigma_y_star, sigma_y_star, sigma_y, sigma_y);
  return s;
}

void GcSetup::finish(const Matrix& sigma_n, const Matrix& sigma_n_star, const Matrix& sigma_i_gamma_y,
                     const Matrix& sigma_i_gamma_w_y) {
  const double perp = 1.0 + 1.0 / alpha_;
  const double tn = theta_.trace_with(sigma_n), tns = theta_.trace_with(sigma_n_star);
  const double ty = theta_.trace_with(sigma_i_gamma_y), tw = theta_.trace_with(sigma_i_gamma_w_y);
  random_y_ = tn - ty;
  trace_y_ = tn - perp * ty;
  random_w_ = tns - tw;
  trace_w_ = tns - perp * tw;
  if (correlated()) {
    m_y_ = theta_.right_multiply(sigma_y_ - sigma_y_ * gamma_.transpose());
    gamma_m_y_ = trace_product(gamma_, m_y_);
  } else {
    m_y_ = theta_.right_multiply(sigma_y_);
    gamma_m_y_ = 0.0;
  }
}

double GcSetup::value(const FissionDraw& draw, const Vector& y, const Fit& fit, RefitMode refit,
                      Correction correction) const {
  const Index n = size();
  require(y.size() == n && draw.w.size() == n && fit.prediction.size() == n, "gc: dimension mismatch");
  require(std::abs(draw.alpha - alpha_) <= 1e-12 * alpha_, "gc: draw alpha differs from the setup alpha");
  const bool on_y = refit == RefitMode::y;
  const Matrix& g = on_y ? gamma_ : gamma_w_;
  const Vector& base = on_y ? y : draw.w;

  Vector target = draw.w_perp;
  if (correlated()) target.noalias() -= g * (draw.w_perp - base);
  Vector pred = on_y ? fit.smooth(y) : fit.prediction;
  double v = theta_.norm2(target - pred);

  if (correction == Correction::random) {
    double om;
    if (correlated()) {
      Vector adj = draw.omega;
      adj.noalias() -= g * draw.omega;
      om = theta_.norm2(adj);
    } else {
      om = theta_.norm2(draw.omega);
    }
    v += (on_y ? random_y_ : random_w_) - om / alpha_;
  } else {
    v += on_y ? trace_y_ : trace_w_;
  }

  if (on_y) {
    const Matrix& s = fit.smoother;
    double tr = 0.0;
    if (fit.rows.empty()) {
      require(s.cols() == n, "gc: smoother dimension mismatch");
      tr = trace_product(s, m_y_);
    } else {
      require(static_cast<std::size_t>(s.cols()) == fit.rows.size(), "gc: smoother dimension mismatch");
      for (Index k = 0; k < s.cols(); ++k) tr += s.col(k).dot(m_y_.row(fit.rows[static_cast<std::size_t>(k)]).transpose());
    }
    v += 2.0 * (tr - gamma_m_y_);
  }
  return v;
}

double gc_indep(const FissionDraw& draw, const Vector& y, const Fit& fit, RefitMode refit, Correction correction,
                const Matrix& sigma_y, const Matrix& sigma_y_star, const QuadraticForm& theta) {
  return GcSetup::independent(sigma_y, sigma_y_star, draw.alpha, theta).value(draw, y, fit, refit, correction);
}

double gc_corr(const FissionDraw& draw, const Vector& y, const Fit& fit, RefitMode refit,
               const JointGaussianModel& joint, const QuadraticForm& theta, Correction correction) {
  return GcSetup(joint, draw.alpha, theta).value(draw, y, fit, refit, correction);
}

std::vector<ErrorEstimate> gc_bootstrap(const Model& model, const Vector& y, const GcSetup& setup,
                                        const GaussianSampler& noise, int draws, std::uint64_t seed,
                                        const std::vector<GcVariant>& variants) {
  require(draws >= 1, "gc_bootstrap: B must be >= 1");
  require(!variants.empty(), "gc_bootstrap: no variants requested");
  require(model.bag() == nullptr, "gc_bootstrap: use gc_bagged_estimate for parametric bags");
  bool need_smoother = false;
  for (const GcVariant& v : variants) need_smoother = need_smoother || v.refit == RefitMode::y;
  if (need_smoother && !model.linear_smoother())
    throw std::invalid_argument("gc_bootstrap: refit on Y needs S(W); model '" + model.name() +
                                "' is a general prediction rule");

  std::vector<std::vector<double>> values(variants.size());
  for (auto& v : values) v.reserve(static_cast<std::size_t>(draws));
  for (int b = 0; b < draws; ++b) {
    const auto key = static_cast<std::uint64_t>(b);
    FissionDraw draw = fission(y, noise, setup.alpha(), derive_seed(seed, Stream::fission, {key}));
    Fit fit = model.fit(draw.w, derive_seed(seed, Stream::model, {key}), need_smoother);
    for (std::size_t j = 0; j < variants.size(); ++j)
      values[j].push_back(setup.value(draw, y, fit, variants[j].refit, variants[j].correction));
  }
  std::vector<ErrorEstimate> out;
  for (std::size_t j = 0; j < variants.size(); ++j) {
    ErrorEstimate e = ErrorEstimate::from_draws(setup.correlated() ? "gc_corr" : "gc_indep", std::move(values[j]));
    e.model = model.name();
    e.alpha = setup.alpha();
    e.seed = seed;
    e.correction = to_string(variants[j].correction);
    e.refit = to_string(variants[j].refit);
    out.push_back(std::move(e));
  }
  return out;
}

double gc_bagged(const BagPredictions& bag, const std::vector<double>& per_draw_gc, const QuadraticForm& theta) {
  const Index k = bag.size();
  require(k >= 1, "gc_bagged: empty bag");
  require(static_cast<Index>(per_draw_gc.size()) == k, "gc_bagged: K mismatch between bag and gc values");
  require(bag.predictions.rows() == theta.size(), "gc_bagged: dimension mismatch");
  const Vector centre = bag.mean();
  double spread = 0.0;
  for (Index j = 0; j < k; ++j) spread += theta.norm2(bag.predictions.col(j) - centre);
  double sum = 0.0;
  for (double v : per_draw_gc) sum += v;
  return (sum - spread) / static_cast<double>(k);
}

std::vector<ErrorEstimate> gc_bagged_estimate(const Model& bagged_model, const Vector& y, const GcSetup& setup,
                                              std::uint64_t seed, const std::vector<Correction>& corrections) {
  const BagConfig* cfg = bagged_model.bag();
  require(cfg != nullptr, "gc_bagged_estimate: model is not a parametric bag");
  require(std::abs(cfg->alpha - setup.alpha()) <= 1e-12 * cfg->alpha, "gc_bagged_estimate: setup alpha differs from bag alpha");
  require(!corrections.empty(), "gc_bagged_estimate: no corrections requested");
  std::vector<std::vector<double>> values(corrections.size());
  BagPredictions bag = bagged_fit(*cfg->base, y, *cfg->noise, cfg->alpha, cfg->size, cfg->refit, seed,
                                  [&](int, const FissionDraw& draw, const Fit& fit) {
                                    for (std::size_t j = 0; j < corrections.size(); ++j)
                                      values[j].push_back(setup.value(draw, y, fit, cfg->refit, corrections[j]));
                                  });
  std::vector<ErrorEstimate> out;
  for (std::size_t j = 0; j < corrections.size(); ++j) {
    const double value = gc_bagged(bag, values[j], setup.theta());
    ErrorEstimate e = ErrorEstimate::from_draws(setup.correlated() ? "gc_corr_bagged" : "gc_indep_bagged",
                                                std::move(values[j]));
    e.value = value;
    e.model = bagged_model.name();
    e.alpha = setup.alpha();
    e.seed = seed;
    e.correction = to_string(corrections[j]);
    e.refit = to_string(cfg->refit);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace gencp
