#include "gencp/gaussian/covariance.hpp"

#include <cmath>

namespace gencp {

Locations::Locations(Matrix points) : points_(std::move(points)) {
  require(points_.rows() >= 1, "Locations: need at least one point");
  require(points_.cols() >= 1, "Locations: need at least one coordinate");
  require(points_.allFinite(), "Locations: non-finite coordinate");
}

Matrix Locations::distances() const {
  const Index n = size();
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = distance(i, j);
  }
  return d;
}

Locations Locations::grid(Index side, double extent) {
  require(side >= 1, "Locations::grid: side must be >= 1");
  require(extent > 0.0, "Locations::grid: extent must be > 0");
  Matrix pts(side * side, 2);
  const double step = extent / static_cast<double>(side);
  for (Index r = 0; r < side; ++r)
    for (Index c = 0; c < side; ++c) {
      pts(r * side + c, 0) = (static_cast<double>(c) + 0.5) * step;
      pts(r * side + c, 1) = (static_cast<double>(r) + 0.5) * step;
    }
  return Locations(std::move(pts));
}

Matrix build_sigma(const Locations& loc, const MaternSpec& spec, bool include_nugget) {
  spec.validate();
  MaternSpec kernel = spec;
  if (!include_nugget) kernel.nugget = 0.0;
  const Index n = loc.size();
  Matrix sigma(n, n);
  const double diag = kernel.nugget + kernel.sill;
  for (Index i = 0; i < n; ++i) {
    sigma(i, i) = diag;
    for (Index j = i + 1; j < n; ++j) {
      const double d = loc.distance(i, j);
      // coincident points share the structured part only; the nugget sits on the diagonal
      const double v = d == 0.0 ? kernel.sill : matern_cov(d, kernel);
      sigma(i, j) = sigma(j, i) = v;
    }
  }
  return sigma;
}

std::string to_string(NoiseMode mode) { return mode == NoiseMode::nsn ? "NSN" : "SSN"; }

NoiseMode parse_noise_mode(const std::string& text) {
  if (text == "NSN" || text == "nsn") return NoiseMode::nsn;
  if (text == "SSN" || text == "ssn") return NoiseMode::ssn;
  throw ConfigError("unknown noise mode '" + text + "' (expected NSN or SSN)");
}

JointGaussianModel::JointGaussianModel(Vector mean_star, Vector mean, Matrix cov_star, Matrix cov, Matrix cross)
    : mean_star_(std::move(mean_star)),
      mean_(std::move(mean)),
      cov_star_(std::move(cov_star)),
      cov_(std::move(cov)),
      cross_(std::move(cross)) {
  const Index n = mean_.size();
  require(n >= 1, "JointGaussianModel: empty model");
  require(mean_star_.size() == n, "JointGaussianModel: mean dimension mismatch");
  require(cov_star_.rows() == n && cov_star_.cols() == n, "JointGaussianModel: cov_star dimension mismatch");
  require(cov_.rows() == n && cov_.cols() == n, "JointGaussianModel: cov dimension mismatch");
  require(cross_.rows() == n && cross_.cols() == n, "JointGaussianModel: cross dimension mismatch");
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  require((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale, "JointGaussianModel: cov not symmetric");
  require((cov_star_ - cov_star_.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          "JointGaussianModel: cov_star not symmetric");
  independent_ = cross_.cwiseAbs().maxCoeff() == 0.0;

  // Sigma_Y only needs to be PSD here; estimators that invert it check definiteness themselves.
  response_ = std::make_shared<const GaussianSampler>(cov_);
  stacked_ = std::make_shared<const GaussianSampler>(stacked_cov());
}

Matrix JointGaussianModel::stacked_cov() const {
  const Index n = size();
  Matrix s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = cov_star_;
  s.topRightCorner(n, n) = cross_;
  s.bottomLeftCorner(n, n) = cross_.transpose();
  s.bottomRightCorner(n, n) = cov_;
  return s;
}

JointGaussianModel JointGaussianModel::with_mean(Vector mean_star, Vector mean) const {
  require(mean_star.size() == size() && mean.size() == size(), "with_mean: dimension mismatch");
  JointGaussianModel out = *this;
  out.mean_star_ = std::move(mean_star);
  out.mean_ = std::move(mean);
  return out;
}

JointGaussianModel make_joint(NoiseMode mode, const Matrix& structured, double delta, const Vector& x_beta,
                              double snr_target) {
  const Index n = structured.rows();
  require(structured.cols() == n, "make_joint: structured covariance must be square");
  require(x_beta.size() == n, "make_joint: mean dimension mismatch");
  require(delta >= 0.0 && delta <= 1.0, "make_joint: delta must lie in [0, 1]");
  require(snr_target > 0.0 && std::isfinite(snr_target), "make_joint: snr_target must be > 0");
  const double d0 = structured(0, 0);
  for (Index i = 1; i < n; ++i)
    require(std::abs(structured(i, i) - d0) <= 1e-10 * std::max(1.0, std::abs(d0)),
            "make_joint: structured covariance must have a constant diagonal");

  const double mean = x_beta.mean();
  const double var_n = (x_beta.array() - mean).square().sum() / static_cast<double>(n);
  require(var_n > 0.0, "make_joint: x_beta has zero empirical variance; SNR scaling undefined");

  Matrix base = delta * structured;
  base.diagonal().array() += 1.0 - delta;
  const double diag = base(0, 0);
  require(diag > 0.0, "make_joint: degenerate noise diagonal");
  const double c = var_n / (snr_target * diag);
  Matrix cov = c * base;
  Matrix cross = mode == NoiseMode::ssn ? Matrix(c * delta * structured) : Matrix::Zero(n, n);
  return JointGaussianModel(x_beta, x_beta, cov, cov, std::move(cross));
}

JointSample sample_joint(const JointGaussianModel& model, Rng& rng) {
  const Index n = model.size();
  Vector z = model.stacked_sampler().draw(rng);
  JointSample s;
  s.y_star = model.mean_star() + z.head(n);
  s.y = model.mean() + z.tail(n);
  return s;
}

JointSample sample_joint(const JointGaussianModel& model, std::uint64_t seed) {
  Rng rng(seed);
  return sample_joint(model, rng);
}

}  // namespace gencp
