#include "doctest.h"

#include "gencp/gaussian/matern.hpp"
#include "gencp/gaussian/sampler.hpp"
#include "gencp/models/model.hpp"
#include "gencp/rng.hpp"
#include "gencp/variogram/variogram.hpp"

#include <algorithm>

using namespace gencp;

namespace {

double objective(const EmpiricalVariogram& vg, const MaternSpec& spec) {
  double s = 0.0;
  for (std::size_t k = 0; k < vg.size(); ++k) {
    const double d = vg.gamma[k] - matern_semivariance(vg.centers[k], spec);
    s += static_cast<double>(vg.counts[k]) * d * d;
  }
  return std::sqrt(s);
}

Vector matern_field(const Locations& loc, const MaternSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return GaussianSampler(build_sigma(loc, spec)).draw(rng);
}

}  // namespace

TEST_CASE("constant residuals give zero semivariance") {
  const Locations loc = Locations::grid(5, 5.0);
  const EmpiricalVariogram vg = empirical_variogram(loc, Vector::Constant(25, 3.0), 5);
  REQUIRE(vg.size() >= 1);
  for (double g : vg.gamma) CHECK(g == 0.0);
  CHECK(vg.residual_variance == 0.0);
}

TEST_CASE("two points in one bin") {
  Matrix pts(2, 2);
  pts << 0, 0, 3, 4;
  const EmpiricalVariogram vg = empirical_variogram(Locations(pts), Vector((Vector(2) << 1.5, -0.5).finished()), 1, 10.0);
  REQUIRE(vg.size() == 1);
  CHECK(vg.gamma[0] == doctest::Approx(2.0));
  CHECK(vg.centers[0] == doctest::Approx(5.0));
  CHECK(vg.counts[0] == 1);
}

TEST_CASE("binning matches a direct pair loop") {
  Rng rng(4);
  Matrix pts(30, 2);
  pts.col(0) = 3.0 * standard_normal(30, rng);
  pts.col(1) = 3.0 * standard_normal(30, rng);
  const Locations loc(pts);
  const Vector r = standard_normal(30, rng);
  const int bins = 6;
  const EmpiricalVariogram vg = empirical_variogram(loc, r, bins);
  double dmax = 0.0;
  for (Index i = 0; i < 30; ++i)
    for (Index j = i + 1; j < 30; ++j) dmax = std::max(dmax, loc.distance(i, j));
  CHECK(vg.max_lag == doctest::Approx(dmax / 2.0));
  std::vector<double> sum(bins, 0.0), dist(bins, 0.0);
  std::vector<long> cnt(bins, 0);
  for (Index i = 0; i < 30; ++i)
    for (Index j = i + 1; j < 30; ++j) {
      const double d = loc.distance(i, j);
      if (d > vg.max_lag) continue;
      const int b = std::min(bins - 1, static_cast<int>(d / (vg.max_lag / bins)));
      sum[static_cast<std::size_t>(b)] += (r(i) - r(j)) * (r(i) - r(j));
      dist[static_cast<std::size_t>(b)] += d;
      ++cnt[static_cast<std::size_t>(b)];
    }
  std::size_t k = 0;
  for (int b = 0; b < bins; ++b) {
    if (cnt[static_cast<std::size_t>(b)] == 0) continue;
    REQUIRE(k < vg.size());
    const auto c = static_cast<double>(cnt[static_cast<std::size_t>(b)]);
    CHECK(vg.counts[k] == cnt[static_cast<std::size_t>(b)]);
    CHECK(vg.gamma[k] == doctest::Approx(sum[static_cast<std::size_t>(b)] / (2.0 * c)));
    CHECK(vg.centers[k] == doctest::Approx(dist[static_cast<std::size_t>(b)] / c));
    ++k;
  }
  CHECK(k == vg.size());
  CHECK(std::is_sorted(vg.centers.begin(), vg.centers.end()));
}

TEST_CASE("all pairs in one bin is an error") {
  Matrix pts(3, 2);
  pts << 0, 0, 1, 0, 0.5, std::sqrt(0.75);
  CHECK_THROWS(empirical_variogram(Locations(pts), Vector::LinSpaced(3, 0, 1), 5, 10.0));
}

TEST_CASE("binned semivariance matches the exponential model") {
  const Locations loc = Locations::grid(12, 12.0);
  const MaternSpec truth{0.25, 0.75, 0.5, 1.0};
  const int reps = 200;
  EmpiricalVariogram first;
  std::vector<std::vector<double>> per_bin;
  for (int r = 0; r < reps; ++r) {
    const EmpiricalVariogram vg = empirical_variogram(loc, matern_field(loc, truth, 100 + r), 8, 4.0);
    if (r == 0) {
      first = vg;
      per_bin.resize(vg.size());
    }
    REQUIRE(vg.size() == first.size());
    for (std::size_t k = 0; k < vg.size(); ++k) per_bin[k].push_back(vg.gamma[k]);
  }
  for (std::size_t k = 0; k < first.size(); ++k) {
    // every pair in a bin has the same expectation only up to the distance spread; compare at the
    // mean pair distance with a small allowance for the curvature of the model
    const MeanSe ms = mean_se(per_bin[k]);
    const double h = first.centers[k];
    const double model = 0.75 * (1.0 - std::exp(-h)) + 0.25;
    INFO("bin " << k << " h " << h << " mean " << ms.mean << " se " << ms.se << " model " << model);
    CHECK(std::abs(ms.mean - model) < 4.0 * ms.se + 0.02 * model);
  }
}

TEST_CASE("fit recovers a known Matern from the mean variogram on a 20 x 20 grid") {
  // one field of 400 points leaves the nugget poorly determined, so the semivariances are
  // averaged over independent fields before fitting
  const Locations loc = Locations::grid(20, 10.0);
  const MaternSpec truth{0.25, 0.75, 0.5, 1.0};
  const GaussianSampler sampler(build_sigma(loc, truth));
  Rng rng(7);
  EmpiricalVariogram pooled;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const EmpiricalVariogram vg = empirical_variogram(loc, sampler.draw(rng));
    if (r == 0) {
      pooled = vg;
      continue;
    }
    REQUIRE(vg.size() == pooled.size());
    for (std::size_t k = 0; k < vg.size(); ++k) pooled.gamma[k] += vg.gamma[k];
    pooled.residual_variance += vg.residual_variance;
  }
  for (double& g : pooled.gamma) g /= reps;
  pooled.residual_variance /= reps;
  MaternBounds bounds = MaternBounds::defaults(pooled);
  MaternBounds pinned = MaternBounds::defaults(pooled);
  pinned.lower[2] = pinned.upper[2] = 0.5;
  for (MaternBounds* b : {&pinned, &bounds}) {
    const VariogramFit fit = fit_matern(pooled, *b, default_matern_init(pooled, *b));
    INFO(fit.spec.describe() << " " << fit.message);
    CHECK(fit.converged);
    CHECK(fit.spec.nugget == doctest::Approx(0.25).epsilon(0.25));
    CHECK(fit.spec.sill == doctest::Approx(0.75).epsilon(0.25));
    CHECK(fit.spec.range == doctest::Approx(1.0).epsilon(0.25));
  }
}

TEST_CASE("starting at the optimum stops at once") {
  const Locations loc = Locations::grid(15, 15.0);
  const EmpiricalVariogram vg = empirical_variogram(loc, matern_field(loc, {0.2, 1.0, 1.5, 2.0}, 9));
  const MaternBounds bounds = MaternBounds::defaults(vg);
  const VariogramFit first = fit_matern(vg, bounds, default_matern_init(vg, bounds));
  REQUIRE(first.converged);
  const VariogramFit again = fit_matern(vg, bounds, first.spec);
  CHECK(again.converged);
  CHECK(again.iterations <= 5);
  CHECK(again.spec.sill == doctest::Approx(first.spec.sill).epsilon(1e-6));
  CHECK(again.spec.range == doctest::Approx(first.spec.range).epsilon(1e-6));
  CHECK(again.residual_norm <= first.residual_norm * (1.0 + 1e-9));
}

TEST_CASE("pinned smoothness: LM beats a brute-force three parameter search") {
  const Locations loc = Locations::grid(15, 15.0);
  const EmpiricalVariogram vg = empirical_variogram(loc, matern_field(loc, {0.1, 1.0, 2.5, 3.0}, 11));
  MaternBounds bounds = MaternBounds::defaults(vg);
  bounds.lower[2] = bounds.upper[2] = 2.5;
  const VariogramFit fit = fit_matern(vg, bounds, default_matern_init(vg, bounds));
  CHECK(fit.spec.smoothness == 2.5);
  CHECK(fit.residual_norm == doctest::Approx(objective(vg, fit.spec)).epsilon(1e-9));
  double best = std::numeric_limits<double>::infinity();
  const double v = vg.residual_variance;
  for (int a = 0; a <= 20; ++a)
    for (int b = 1; b <= 40; ++b)
      for (int c = 0; c <= 40; ++c) {
        const MaternSpec s{v * a / 20.0, 2.0 * v * b / 40.0, 2.5,
                           bounds.lower[3] + (bounds.upper[3] - bounds.lower[3]) * c / 40.0};
        if (s.range <= 0.0) continue;
        best = std::min(best, objective(vg, s));
      }
  CHECK(fit.residual_norm <= best * (1.0 + 1e-6));
  for (int k = 0; k < 4; ++k) {
    const double p = k == 0 ? fit.spec.nugget : k == 1 ? fit.spec.sill : k == 2 ? fit.spec.smoothness : fit.spec.range;
    CHECK(p >= bounds.lower[static_cast<std::size_t>(k)]);
    CHECK(p <= bounds.upper[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("fitted semivariance is nondecreasing") {
  const Locations loc = Locations::grid(12, 12.0);
  const EmpiricalVariogram vg = empirical_variogram(loc, matern_field(loc, {0.3, 0.5, 1.5, 2.0}, 5));
  const VariogramFit fit = fit_matern(vg);
  double prev = 0.0;
  for (double h = 0.01; h < 20.0; h += 0.05) {
    const double g = matern_semivariance(h, fit.spec);
    CHECK(g >= prev - 1e-12);
    prev = g;
  }
  CHECK(fit.to_csv().find("nugget") != std::string::npos);
  CHECK(vg.to_csv().rfind("bin,center,gamma,count\n", 0) == 0);
}

TEST_CASE("too few bins for a fit") {
  const Locations loc = Locations::grid(5, 5.0);
  Rng rng(1);
  const EmpiricalVariogram vg = empirical_variogram(loc, standard_normal(25, rng), 3);
  CHECK_THROWS(fit_matern(vg));
}

TEST_CASE("estimated covariance blocks") {
  const Locations loc = Locations::grid(12, 12.0);
  const Vector field = matern_field(loc, {0.3, 1.0, 1.5, 3.0}, 13);
  ModelContext ctx;
  ctx.x = Matrix::Ones(144, 1);
  ModelSpec spec;
  spec.kind = "zero";
  const ModelPtr zero = make_model(spec, ctx);
  const EstimatedCovariance ssn = sigma_from_residuals(loc, field, *zero, NoiseMode::ssn);
  const EstimatedCovariance nsn = sigma_from_residuals(loc, field, *zero, NoiseMode::nsn);
  REQUIRE_FALSE(ssn.diagonal_fallback);
  CHECK((ssn.joint->cov() - nsn.joint->cov()).norm() == 0.0);
  CHECK(nsn.joint->cross().norm() == 0.0);
  const Matrix diff = ssn.joint->cov() - ssn.joint->cross();
  CHECK((diff - ssn.fit.spec.nugget * Matrix::Identity(144, 144)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ssn.residuals - field).norm() == 0.0);
}

TEST_CASE("pure nugget residuals share nothing") {
  const Locations loc = Locations::grid(12, 12.0);
  Rng rng(17);
  const Vector white = standard_normal(144, rng);
  ModelContext ctx;
  ctx.x = Matrix::Ones(144, 1);
  ModelSpec spec;
  spec.kind = "zero";
  const EstimatedCovariance est = sigma_from_residuals(loc, white, *make_model(spec, ctx), NoiseMode::ssn);
  const double v = est.variogram.residual_variance;
  INFO(est.fit.spec.describe());
  // whatever was fitted, almost none of the variance is shared between distinct points
  double off = 0.0;
  for (Index i = 0; i < 144; ++i)
    for (Index j = 0; j < 144; ++j)
      if (i != j) off = std::max(off, std::abs(est.joint->cross()(i, j)));
  CHECK(off < 0.15 * v);

  const EstimatedCovariance flat = sigma_from_residuals(loc, Vector::Constant(144, 2.0), *make_model(spec, ctx),
                                                        NoiseMode::ssn);
  CHECK(flat.diagonal_fallback);
  CHECK(flat.joint->cross().norm() == 0.0);
}
