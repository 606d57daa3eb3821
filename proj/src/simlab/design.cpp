#include "gencp/simlab/design.hpp"

#include "gencp/rng.hpp"

#include <numbers>

namespace gencp {

Index spike_count(Index n) {
  require(n >= 1, "spike_count: n must be >= 1");
  return static_cast<Index>(std::ceil(2.0 * std::log(static_cast<double>(n)) - 1e-12));
}

Vector friedman_mean(const Matrix& x) {
  require(x.cols() >= 5, "friedman_mean: needs at least 5 columns");
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    const double a = std::sin(std::numbers::pi * x(i, 0) * x(i, 1));
    const double b = x(i, 2) - 0.5;
    out(i) = (10.0 * a + 20.0 * b * b + 10.0 * x(i, 3) + 5.0 * x(i, 4)) / 6.0;
  }
  return out;
}

Design gen_design(const DesignConfig& config, std::uint64_t seed) {
  require(config.p >= 1 && config.s >= 0 && config.s <= config.p, "gen_design: need 0 <= s <= p and p >= 1");
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(config.n))));
  require(side >= 2, "gen_design: n too small for a grid");
  const double extent = config.extent > 0.0 ? config.extent : static_cast<double>(side);

  Design d;
  d.locations = Locations::grid(side, extent);
  const Index n = d.locations.size();
  const Matrix dist = d.locations.distances();
  const Index spikes = std::min(spike_count(n), n);

  Rng rng(derive_seed(seed, Stream::design, {0}));
  d.x = Matrix::Zero(n, config.p);
  IndexList order = iota_indices(n);
  for (Index j = 0; j < config.p; ++j) {
    shuffle(order, rng);
    for (Index k = 0; k < spikes; ++k) {
      const double magnitude = uniform(rng, 1.0, 3.0) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      const Index at = order[static_cast<std::size_t>(k)];
      for (Index i = 0; i < n; ++i) d.x(i, j) += magnitude * matern_cov(dist(i, at), config.smoothing);
    }
  }

  Rng beta_rng(derive_seed(seed, Stream::design, {1}));
  d.beta = Vector::Zero(config.p);
  if (config.mean == "friedman") {
    for (Index j = 0; j < config.p; ++j) {
      const double lo = d.x.col(j).minCoeff(), hi = d.x.col(j).maxCoeff();
      d.x.col(j) = hi > lo ? Vector((d.x.col(j).array() - lo) / (hi - lo)) : Vector::Zero(n);
    }
    d.mean = friedman_mean(d.x);
  } else {
    IndexList idx = iota_indices(config.p);
    shuffle(idx, beta_rng);
    for (Index k = 0; k < config.s; ++k) d.beta(idx[static_cast<std::size_t>(k)]) = uniform(beta_rng, -1.0, 1.0);
    d.mean = d.x * d.beta;
  }
  return d;
}

JointGaussianModel simulation_joint(const Design& design, const NoiseConfig& noise, NoiseMode mode) {
  return make_joint(mode, build_sigma(design.locations, noise.structured, true), noise.delta, design.mean, noise.snr);
}

}  // namespace gencp
