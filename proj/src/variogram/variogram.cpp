#include "gencp/variogram/variogram.hpp"

#include "gencp/estimators/estimate.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <sstream>

namespace gencp {

std::string EmpiricalVariogram::to_csv() const {
  std::ostringstream os;
  os << "bin,center,gamma,count\n";
  for (std::size_t k = 0; k < size(); ++k)
    os << k << "," << format_double(centers[k]) << "," << format_double(gamma[k]) << "," << counts[k] << "\n";
  return os.str();
}

EmpiricalVariogram empirical_variogram(const Locations& loc, const Vector& residuals, int n_bins, double max_lag) {
  const Index n = loc.size();
  require(residuals.size() == n, "empirical_variogram: residual length does not match locations");
  require(n >= 2, "empirical_variogram: need at least two points");
  require(n_bins >= 1, "empirical_variogram: need at least one bin");
  require(residuals.allFinite(), "empirical_variogram: non-finite residuals");

  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  double dmax = 0.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      dist.push_back(loc.distance(i, j));
      dmax = std::max(dmax, dist.back());
    }

  EmpiricalVariogram vg;
  vg.max_lag = max_lag > 0.0 ? max_lag : 0.5 * dmax;
  require(vg.max_lag > 0.0, "empirical_variogram: all locations coincide");
  vg.bin_width = vg.max_lag / n_bins;
  const double mean = residuals.mean();
  vg.residual_variance = (residuals.array() - mean).square().mean();

  std::vector<double> sum_d(static_cast<std::size_t>(n_bins), 0.0), sum_sq(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<long> count(static_cast<std::size_t>(n_bins), 0);
  std::size_t p = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j, ++p) {
      const double d = dist[p];
      if (d > vg.max_lag) continue;
      const auto k = static_cast<std::size_t>(std::min(static_cast<int>(d / vg.bin_width), n_bins - 1));
      const double diff = residuals(i) - residuals(j);
      sum_d[k] += d;
      sum_sq[k] += diff * diff;
      ++count[k];
    }
  for (std::size_t k = 0; k < count.size(); ++k) {
    if (count[k] == 0) continue;
    vg.centers.push_back(sum_d[k] / static_cast<double>(count[k]));
    vg.gamma.push_back(sum_sq[k] / (2.0 * static_cast<double>(count[k])));
    vg.counts.push_back(count[k]);
  }
  require(!vg.centers.empty(), "empirical_variogram: no pairs within the maximum lag");
  require(n_bins == 1 || vg.centers.size() > 1,
          "empirical_variogram: every pair fell in a single bin; increase the number of bins or the maximum lag");

  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  vg.median_distance = *mid;
  return vg;
}

MaternBounds MaternBounds::defaults(const EmpiricalVariogram& vg) {
  require(vg.size() > 0, "MaternBounds: empty variogram");
  const double v = vg.residual_variance > 0.0 ? vg.residual_variance : 1.0;
  MaternBounds b;
  b.lower = {0.0, 1e-8, 0.1, vg.centers.front()};
  b.upper = {v, 2.0 * v, 5.0, 2.0 * vg.max_lag};
  return b;
}

MaternSpec default_matern_init(const EmpiricalVariogram& vg, const MaternBounds& bounds) {
  const double v = vg.residual_variance > 0.0 ? vg.residual_variance : 1.0;
  std::array<double, 4> t{0.1 * v, 0.9 * v, 0.5, vg.median_distance};
  for (std::size_t k = 0; k < 4; ++k) t[k] = std::clamp(t[k], bounds.lower[k], bounds.upper[k]);
  return {t[0], t[1], t[2], t[3]};
}

std::string VariogramFit::to_csv() const {
  std::ostringstream os;
  os << "parameter,value\n"
     << "nugget," << format_double(spec.nugget) << "\n"
     << "sill," << format_double(spec.sill) << "\n"
     << "smoothness," << format_double(spec.smoothness) << "\n"
     << "range," << format_double(spec.range) << "\n"
     << "converged," << (converged ? 1 : 0) << "\n"
     << "iterations," << iterations << "\n"
     << "residual_norm," << format_double(residual_norm) << "\n";
  return os.str();
}

namespace {

using Params = std::array<double, 4>;

MaternSpec to_spec(const Params& t) { return {t[0], t[1], t[2], t[3]}; }

Vector weighted_residuals(const EmpiricalVariogram& vg, const Params& t) {
  const MaternSpec spec = to_spec(t);
  Vector r(static_cast<Index>(vg.size()));
  for (std::size_t k = 0; k < vg.size(); ++k)
    r(static_cast<Index>(k)) = std::sqrt(static_cast<double>(vg.counts[k])) *
                               (matern_semivariance(vg.centers[k], spec) - vg.gamma[k]);
  return r;
}

}  // namespace

VariogramFit fit_matern(const EmpiricalVariogram& vg, const MaternBounds& bounds, const MaternSpec& init) {
  require(vg.size() >= 4, "fit_matern: need at least 4 variogram bins");
  for (std::size_t k = 0; k < 4; ++k)
    require(bounds.lower[k] <= bounds.upper[k], "fit_matern: lower bound above upper bound");
  require(bounds.lower[2] > 0.0 && bounds.lower[3] > 0.0, "fit_matern: smoothness and range bounds must be positive");

  std::vector<int> free;
  for (int k = 0; k < 4; ++k)
    if (!bounds.pinned(k)) free.push_back(k);
  Params t{init.nugget, init.sill, init.smoothness, init.range};
  for (std::size_t k = 0; k < 4; ++k) t[k] = std::clamp(t[k], bounds.lower[k], bounds.upper[k]);

  VariogramFit out;
  Vector r = weighted_residuals(vg, t);
  double cost = r.squaredNorm();
  const auto m = static_cast<Index>(free.size());
  double lambda = 1e-3;
  constexpr int kMaxIterations = 200;

  if (m == 0) {
    out.converged = true;
    out.message = "all parameters pinned";
  }
  while (m > 0 && out.iterations < kMaxIterations) {
    ++out.iterations;
    Matrix jac(r.size(), m);
    for (Index c = 0; c < m; ++c) {
      const auto k = static_cast<std::size_t>(free[static_cast<std::size_t>(c)]);
      const double span = bounds.upper[k] - bounds.lower[k];
      double h = 1e-6 * std::max(std::abs(t[k]), std::isfinite(span) ? std::min(span, 1.0) : 1.0);
      Params tp = t;
      tp[k] = t[k] + h;
      if (tp[k] > bounds.upper[k]) {
        h = -h;
        tp[k] = t[k] + h;
      }
      jac.col(c) = (weighted_residuals(vg, tp) - r) / h;
    }
    const Vector grad = jac.transpose() * r;
    // coordinates held at a bound that the descent direction would push further out
    std::vector<Index> act;
    for (Index c = 0; c < m; ++c) {
      const auto k = static_cast<std::size_t>(free[static_cast<std::size_t>(c)]);
      const bool at_lower = t[k] <= bounds.lower[k] && grad(c) > 0.0;
      const bool at_upper = t[k] >= bounds.upper[k] && grad(c) < 0.0;
      if (!at_lower && !at_upper) act.push_back(c);
    }
    const auto ma = static_cast<Index>(act.size());
    Params trial = t;
    double step2 = 0.0, norm2 = 0.0;
    for (Index c = 0; c < m; ++c) {
      const auto k = static_cast<std::size_t>(free[static_cast<std::size_t>(c)]);
      norm2 += t[k] * t[k];
    }
    if (ma > 0) {
      Matrix ja(r.size(), ma);
      for (Index c = 0; c < ma; ++c) ja.col(c) = jac.col(act[static_cast<std::size_t>(c)]);
      const Matrix a = ja.transpose() * ja;
      const Vector g = ja.transpose() * r;
      const double dmax = std::max(a.diagonal().maxCoeff(), 1e-300);
      Matrix damped = a;
      for (Index c = 0; c < ma; ++c) damped(c, c) += lambda * std::max(a(c, c), 1e-12 * dmax);
      const Vector delta = -damped.ldlt().solve(g);
      for (Index c = 0; c < ma; ++c) {
        const auto k = static_cast<std::size_t>(free[static_cast<std::size_t>(act[static_cast<std::size_t>(c)])]);
        trial[k] = std::clamp(t[k] + delta(c), bounds.lower[k], bounds.upper[k]);
        step2 += (trial[k] - t[k]) * (trial[k] - t[k]);
      }
    }
    const double rel_step = std::sqrt(step2) / std::max(std::sqrt(norm2), 1e-12);
    const Vector r_trial = weighted_residuals(vg, trial);
    const double cost_trial = r_trial.squaredNorm();
    if (std::isfinite(cost_trial) && cost_trial <= cost) {
      t = trial;
      r = r_trial;
      cost = cost_trial;
      lambda = std::max(lambda / 3.0, 1e-12);
    } else {
      lambda *= 4.0;
    }
    if (rel_step < 1e-8) {
      out.converged = true;
      out.message = "relative step below 1e-8";
      break;
    }
    if (lambda > 1e12) {
      out.converged = true;
      out.message = "no decrease at maximal damping";
      break;
    }
  }
  if (!out.converged) out.message = "iteration limit reached";
  out.spec = to_spec(t);
  out.residual_norm = std::sqrt(cost);
  return out;
}

VariogramFit fit_matern(const EmpiricalVariogram& vg) {
  const MaternBounds bounds = MaternBounds::defaults(vg);
  return fit_matern(vg, bounds, default_matern_init(vg, bounds));
}

EstimatedCovariance sigma_from_residuals(const Locations& loc, const Vector& y, const Model& model, NoiseMode mode,
                                         const VariogramOptions& options, std::uint64_t seed) {
  const Index n = loc.size();
  require(y.size() == n, "sigma_from_residuals: response length does not match locations");
  EstimatedCovariance out;
  const Fit fit = model.fit(y, seed);
  require(fit.prediction.size() == n, "sigma_from_residuals: model must predict at every location");
  out.residuals = y - fit.prediction;
  out.variogram = empirical_variogram(loc, out.residuals, options.n_bins, options.max_lag);
  const double var = out.variogram.residual_variance;

  if (out.variogram.size() >= 4 && var > 0.0) {
    out.fit = fit_matern(out.variogram);
    if (!out.fit.converged) out.flags.push_back("variogram_not_converged");
    out.diagonal_fallback = out.fit.spec.sill < options.degenerate_sill * var;
  } else {
    out.diagonal_fallback = true;
    out.fit.message = "too few bins or zero residual variance";
  }

  Matrix cov, cross;
  if (out.diagonal_fallback) {
    out.flags.push_back("diagonal_fallback");
    cov = Matrix::Identity(n, n) * (var > 0.0 ? var : 1.0);
    cross = Matrix::Zero(n, n);
  } else {
    cov = build_sigma(loc, out.fit.spec, true);
    cross = mode == NoiseMode::ssn ? build_sigma(loc, out.fit.spec, false) : Matrix::Zero(n, n);
  }
  out.joint = std::make_shared<JointGaussianModel>(fit.prediction, fit.prediction, cov, cov, cross);
  return out;
}

}  // namespace gencp
