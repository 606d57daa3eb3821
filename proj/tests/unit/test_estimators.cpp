#include "doctest.h"

#include "gencp/estimators/classical.hpp"
#include "gencp/estimators/decomposition.hpp"
#include "gencp/estimators/gc.hpp"
#include "gencp/models/smoothers.hpp"
#include "gencp/rng.hpp"

using namespace gencp;

namespace {

struct Setting {
  Locations loc = Locations::grid(3, 3.0);
  Matrix x;
  JointGaussianModel joint;
};

Setting make_setting(NoiseMode mode, std::uint64_t seed) {
  Setting s{Locations::grid(3, 3.0), Matrix(), JointGaussianModel(Vector::Zero(1), Vector::Zero(1), Matrix::Identity(1, 1),
                                                                  Matrix::Identity(1, 1), Matrix::Zero(1, 1))};
  Rng rng(seed);
  s.x.resize(9, 2);
  s.x.col(0) = standard_normal(9, rng);
  s.x.col(1) = standard_normal(9, rng);
  const Matrix st = build_sigma(s.loc, MaternSpec{0.0, 1.0, 1.5, 2.0});
  s.joint = make_joint(mode, st, 0.7, s.x * Vector::Ones(2), 1.0);
  return s;
}

ModelPtr make(const std::string& kind, const Matrix& x, int depth = 2) {
  ModelSpec spec;
  spec.kind = kind;
  spec.depth = depth;
  spec.lambda = 0.5;
  ModelContext ctx;
  ctx.x = x;
  return make_model(spec, ctx);
}

// Mean of the single-draw estimator and of its target over joint draws of (Y*, Y, omega).
struct McPair {
  MeanSe est;
  MeanSe truth;
};

McPair mc_single_draw(const Setting& s, const Model& model, const GcSetup& setup, RefitMode refit, Correction corr,
                      int reps, std::uint64_t seed) {
  std::vector<double> est, truth;
  Rng rng(seed);
  for (int r = 0; r < reps; ++r) {
    const JointSample js = sample_joint(s.joint, rng);
    const FissionDraw d = fission(js.y, s.joint.response_sampler(), setup.alpha(), rng);
    const Fit f = model.fit(d.w, 0, refit == RefitMode::y);
    est.push_back(setup.value(d, js.y, f, refit, corr));
    const Vector pred = refit == RefitMode::y ? f.smooth(js.y) : f.prediction;
    truth.push_back(setup.theta().norm2(js.y_star - pred));
  }
  return {mean_se(est), mean_se(truth)};
}

void check_close(const McPair& p) {
  const double se = std::sqrt(p.est.se * p.est.se + p.truth.se * p.truth.se);
  INFO("estimate " << p.est.mean << " truth " << p.truth.mean << " se " << se);
  CHECK(std::abs(p.est.mean - p.truth.mean) < 4.0 * se);
}

}  // namespace

TEST_CASE("decomposition of the joint law") {
  const Setting s = make_setting(NoiseMode::ssn, 1);
  const RegressionDecomposition d = decompose(s.joint, 0.1);
  const Matrix& c = s.joint.cross();
  CHECK((d.gamma * s.joint.cov() - c).norm() < 1e-10);
  CHECK((d.gamma_w - d.gamma / 1.1).norm() < 1e-12);
  CHECK((d.sigma_n - (s.joint.cov_star() - d.gamma * c.transpose())).norm() < 1e-10);
  CHECK((d.sigma_n_perp - (1.0 + 1.0 / 0.1) * d.sigma_i_gamma_y).norm() < 1e-10);
  // N = Y* - Gamma Y is uncorrelated with Y
  CHECK((c - d.gamma * s.joint.cov()).norm() < 1e-10);

  const Setting ind = make_setting(NoiseMode::nsn, 1);
  const RegressionDecomposition di = decompose(ind.joint, 0.1);
  CHECK(di.independent);
  CHECK(di.gamma.norm() == 0.0);
}

TEST_CASE("gc_corr equals gc_indep when the cross block is zero") {
  const Setting s = make_setting(NoiseMode::nsn, 2);
  const ModelPtr tree = make("tree", s.x);
  const QuadraticForm theta = QuadraticForm::identity(9);
  Rng rng(4);
  for (int r = 0; r < 20; ++r) {
    const JointSample js = sample_joint(s.joint, rng);
    const FissionDraw d = fission(js.y, s.joint.response_sampler(), 0.05, rng);
    const Fit f = tree->fit(d.w, 0, true);
    for (RefitMode m : {RefitMode::y, RefitMode::w})
      for (Correction c : {Correction::trace, Correction::random})
        CHECK(gc_corr(d, js.y, f, m, s.joint, theta, c) ==
              gc_indep(d, js.y, f, m, c, s.joint.cov(), s.joint.cov_star(), theta));
  }
}

TEST_CASE("single-draw GC is unbiased for its target") {
  const QuadraticForm id = QuadraticForm::identity(9);
  const QuadraticForm half = QuadraticForm::diagonal((Vector(9) << 1, 0, 1, 0, 1, 0, 1, 0, 1).finished());
  for (NoiseMode mode : {NoiseMode::nsn, NoiseMode::ssn}) {
    const Setting s = make_setting(mode, 3);
    const ModelPtr tree = make("tree", s.x);
    for (const QuadraticForm* theta : {&id, &half})
      for (double alpha : {0.1, 0.5}) {
        const GcSetup setup(s.joint, alpha, *theta);
        for (RefitMode m : {RefitMode::y, RefitMode::w})
          for (Correction c : {Correction::trace, Correction::random}) {
            INFO("mode " << to_string(mode) << " alpha " << alpha << " refit " << to_string(m) << " corr "
                         << to_string(c));
            check_close(mc_single_draw(s, *tree, setup, m, c, 20000, 17));
          }
      }
  }
}

TEST_CASE("ignoring the correlation overstates the error under shared noise") {
  const Setting s = make_setting(NoiseMode::ssn, 3);
  const ModelPtr tree = make("tree", s.x);
  const GcSetup ind = GcSetup::independent(s.joint.cov(), s.joint.cov_star(), 0.1, QuadraticForm::identity(9));
  const McPair p = mc_single_draw(s, *tree, ind, RefitMode::w, Correction::random, 20000, 19);
  const double se = std::sqrt(p.est.se * p.est.se + p.truth.se * p.truth.se);
  CHECK(p.est.mean - p.truth.mean > 4.0 * se);
}

TEST_CASE("bootstrap averages its draws and shares fits across variants") {
  const Setting s = make_setting(NoiseMode::ssn, 5);
  const ModelPtr tree = make("tree", s.x);
  const GcSetup setup(s.joint, 0.05, QuadraticForm::identity(9));
  const JointSample js = sample_joint(s.joint, 8);
  const auto both = gc_bootstrap(*tree, js.y, setup, s.joint.response_sampler(), 30, 5,
                                 {{RefitMode::w, Correction::random}, {RefitMode::y, Correction::trace}});
  REQUIRE(both.size() == 2);
  CHECK(both[0].per_draw.size() == 30);
  CHECK(both[0].estimator == "gc_corr");
  const auto single = gc_bootstrap(*tree, js.y, setup, s.joint.response_sampler(), 30, 5,
                                   {{RefitMode::y, Correction::trace}});
  CHECK(single[0].value == both[1].value);
  double sum = 0.0;
  for (double v : both[0].per_draw) sum += v;
  CHECK(both[0].value == doctest::Approx(sum / 30.0));
  const FissionDraw d0 = fission(js.y, s.joint.response_sampler(), 0.05, derive_seed(5, Stream::fission, {0}));
  const Fit f0 = tree->fit(d0.w, derive_seed(5, Stream::model, {0}));
  CHECK(both[0].per_draw[0] == setup.value(d0, js.y, f0, RefitMode::w, Correction::random));

  const ModelPtr noisy_rule = fixed_prediction_model(Vector::Zero(9));
  CHECK_THROWS(gc_bootstrap(*noisy_rule, js.y, setup, s.joint.response_sampler(), 3, 5,
                            {{RefitMode::y, Correction::trace}}));
}

TEST_CASE("bagged GC removes the spread of the bag") {
  Rng rng(21);
  for (int inst = 0; inst < 10; ++inst) {
    const Index n = 6, k = 5;
    BagPredictions bag;
    bag.predictions.resize(n, k);
    for (Index j = 0; j < k; ++j) bag.predictions.col(j) = standard_normal(n, rng);
    const Vector y_star = standard_normal(n, rng);
    const QuadraticForm theta = QuadraticForm::diagonal(Vector::LinSpaced(n, 0.5, 2.0));
    std::vector<double> exact;
    for (Index j = 0; j < k; ++j) exact.push_back(theta.norm2(y_star - bag.predictions.col(j)));
    CHECK(gc_bagged(bag, exact, theta) == doctest::Approx(theta.norm2(y_star - bag.mean())).epsilon(1e-12));
  }
}

TEST_CASE("mallows has the expectation of the error for a fixed smoother") {
  const Setting s = make_setting(NoiseMode::nsn, 6);
  const Matrix sm = ridge_smoother(s.x, 0.5).weights;
  const Matrix& sig = s.joint.cov();
  const Vector& mu = s.joint.mean();
  const QuadraticForm theta = QuadraticForm::diagonal(Vector::LinSpaced(9, 1.0, 2.0));
  const Matrix th = theta.matrix();
  const Matrix i_s = Matrix::Identity(9, 9) - sm;
  // closed-form expectations
  const double e_cp = (i_s * mu).dot(th * (i_s * mu)) + (th * i_s * sig * i_s.transpose()).trace() +
                      2.0 * (th * sm * sig).trace();
  const double e_err = (i_s * mu).dot(th * (i_s * mu)) + (th * s.joint.cov_star()).trace() +
                       (th * sm * sig * sm.transpose()).trace();
  CHECK(e_cp == doctest::Approx(e_err).epsilon(1e-10));

  const JointSample js = sample_joint(s.joint, 3);
  const ErrorEstimate cp = mallows_cp(js.y, sm, sig, theta);
  CHECK(cp.value == doctest::Approx(theta.norm2(js.y - sm * js.y) + 2.0 * (th * sm * sig).trace()));
  const Matrix inv = sig.inverse();
  CHECK(sure_linear(js.y, sm, sig) ==
        doctest::Approx(mallows_cp(js.y, sm, sig, QuadraticForm::dense(0.5 * (inv + inv.transpose()))).value));
}

TEST_CASE("BY matches mallows for a linear smoother with many draws") {
  const Setting s = make_setting(NoiseMode::nsn, 7);
  const ModelPtr ridge = make("ridge", s.x);
  const JointSample js = sample_joint(s.joint, 4);
  const QuadraticForm id = QuadraticForm::identity(9);
  const Matrix sm = embed_smoother(ridge->fit(js.y, 0, true), 9);
  const double cp = mallows_cp(js.y, sm, s.joint.cov(), id).value;
  const double resid = (js.y - sm * js.y).squaredNorm();
  const OptimismEstimates iid = efron_by_both(js.y, *ridge, s.joint, 0.5, 20000, OptimismMode::iid, 9, id);
  CHECK(iid.by.value - resid == doctest::Approx(cp - resid).epsilon(0.05));
  const OptimismEstimates ssn = efron_by_both(js.y, *ridge, s.joint, 0.5, 20000, OptimismMode::ssn, 9, id);
  CHECK(ssn.by.value - resid == doctest::Approx(cp - resid).epsilon(0.05));
  // Efron's covariance term is alpha times smaller
  CHECK(iid.efron.value - resid == doctest::Approx(0.5 * (cp - resid)).epsilon(0.05));
  const ErrorEstimate by = efron_by(js.y, *ridge, s.joint, 0.5, 20000, OptimismVariant::by, OptimismMode::iid, 9, id);
  CHECK(by.value == iid.by.value);
}

TEST_CASE("estimate csv rows") {
  ErrorEstimate e = ErrorEstimate::from_draws("gc_corr", {1.0, 2.0, 3.0});
  CHECK(e.value == 2.0);
  CHECK(e.std_error == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(estimate_csv_header() == "estimator,model,setting,alpha,B,value,se,seed");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(parse_correction("trace") == Correction::trace);
  CHECK_THROWS(parse_correction("exact"));
}
