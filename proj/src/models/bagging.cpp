#include "gencp/models/bagging.hpp"

#include "gencp/rng.hpp"

namespace gencp {

BagPredictions bagged_fit(const Model& base, const Vector& y, const GaussianSampler& noise, double alpha, int k,
                          RefitMode refit, std::uint64_t seed, const DrawVisitor& visitor) {
  require(k >= 1, "bagged_fit: K must be >= 1");
  require(alpha > 0.0, "bagged_fit: alpha must be > 0");
  require(noise.dim() == y.size(), "bagged_fit: noise dimension mismatch");
  const bool need_smoother = refit == RefitMode::y;
  require(!need_smoother || base.linear_smoother(), "bagged_fit: refit on Y needs a linear smoother base");

  BagPredictions out;
  out.refit = refit;
  out.alpha = alpha;
  out.predictions.resize(y.size(), k);
  for (int j = 0; j < k; ++j) {
    const auto key = static_cast<std::uint64_t>(j);
    FissionDraw draw = fission(y, noise, alpha, derive_seed(seed, Stream::bag, {key}));
    Fit fit = base.fit(draw.w, derive_seed(seed, Stream::model, {key}), need_smoother);
    out.predictions.col(j) = need_smoother ? fit.smooth(y) : fit.prediction;
    if (visitor) visitor(j, draw, fit);
  }
  return out;
}

}  // namespace gencp
