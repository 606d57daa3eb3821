#include "doctest.h"

#include "gencp/cv/cv_error.hpp"
#include "gencp/cv/splits.hpp"
#include "gencp/models/smoothers.hpp"
#include "gencp/rng.hpp"

#include <algorithm>
#include <set>

using namespace gencp;

namespace {

void check_partition(const SplitPlan& plan, Index n) {
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (const SplitPair& p : plan.pairs) {
    CHECK(p.est.size() + p.pred.size() == static_cast<std::size_t>(n));
    std::set<Index> e(p.est.begin(), p.est.end());
    for (Index i : p.pred) {
      CHECK(e.count(i) == 0);
      ++seen[static_cast<std::size_t>(i)];
    }
  }
  for (int s : seen) CHECK(s == 1);
}

}  // namespace

TEST_CASE("k-fold plans partition the points") {
  const SplitPlan plan = kfold_splits(23, 5, 1);
  REQUIRE(plan.pairs.size() == 5);
  check_partition(plan, 23);
  for (const SplitPair& p : plan.pairs) CHECK((p.pred.size() == 4 || p.pred.size() == 5));
  CHECK(kfold_splits(23, 5, 1).to_csv() == plan.to_csv());
  CHECK(kfold_splits(23, 5, 2).to_csv() != plan.to_csv());
  CHECK_THROWS(kfold_splits(3, 5, 1));
}

TEST_CASE("spatial folds are compact clusters") {
  // two well separated blobs of points
  Matrix pts(20, 2);
  for (Index i = 0; i < 10; ++i) {
    pts.row(i) << 0.1 * static_cast<double>(i), 0.0;
    pts.row(10 + i) << 100.0 + 0.1 * static_cast<double>(i), 0.0;
  }
  const Locations loc(pts);
  const SplitPlan plan = spatial_kmeans_splits(loc, 2, 3);
  REQUIRE(plan.pairs.size() == 2);
  check_partition(plan, 20);
  for (const SplitPair& p : plan.pairs) {
    CHECK(p.pred.size() == 10);
    const bool left = p.pred.front() < 10;
    for (Index i : p.pred) CHECK((i < 10) == left);
  }
  const std::vector<int> labels = kmeans_labels(Locations::grid(6, 6.0).points(), 4, 5);
  std::set<int> used(labels.begin(), labels.end());
  CHECK(used.size() == 4);
}

TEST_CASE("buffered leave-one-out respects the radius") {
  const Locations loc = Locations::grid(4, 4.0);
  const SplitPlan plan = bloo_splits(loc, 1.5);
  REQUIRE(plan.pairs.size() == 16);
  for (const SplitPair& p : plan.pairs) {
    REQUIRE(p.pred.size() == 1);
    for (Index j : p.est) CHECK(loc.distance(j, p.pred[0]) > 1.5);
    for (Index j = 0; j < 16; ++j)
      if (j != p.pred[0] && loc.distance(j, p.pred[0]) > 1.5)
        CHECK(std::find(p.est.begin(), p.est.end(), j) != p.est.end());
  }
  const SplitPlan none = bloo_splits(loc, 100.0);
  CHECK(none.pairs.empty());
  CHECK(none.dropped == 16);
}

TEST_CASE("train/test splits") {
  const TrainTest r = random_split(40, 0.25, 7);
  CHECK(r.train.size() == 10);
  CHECK(r.test.size() == 30);
  CHECK(std::is_sorted(r.train.begin(), r.train.end()));
  const Locations loc = Locations::grid(10, 10.0);
  const TrainTest c = clustered_split(loc, 0.25, 7);
  CHECK(c.train.size() == 25);
  // training points fall in at most ceil(2 * 0.25 * 25) = 13 sub-squares
  std::set<int> cells;
  for (Index i : c.train)
    cells.insert(static_cast<int>(loc.points()(i, 0) / 2.0) * 5 + static_cast<int>(loc.points()(i, 1) / 2.0));
  CHECK(cells.size() <= 13);
  CHECK_THROWS(random_split(10, 1.0, 1));
  const SplitPlan mapped = kfold_splits(4, 2, 1).mapped({10, 20, 30, 40});
  for (const SplitPair& p : mapped.pairs)
    for (Index i : p.pred) CHECK(i % 10 == 0);
}

TEST_CASE("OLS correction trace agrees with the dense smoother formula") {
  Rng rng(3);
  const Index n = 30;
  Matrix x(n, 4);
  for (Index j = 0; j < 4; ++j) x.col(j) = standard_normal(n, rng);
  Matrix pts(n, 2);
  pts.col(0) = 5.0 * standard_normal(n, rng);
  pts.col(1) = 5.0 * standard_normal(n, rng);
  const Matrix sigma = build_sigma(Locations(pts), MaternSpec{0.2, 1.0, 0.5, 2.0});
  const TrainTest tt = random_split(n, 0.6, 4);
  // n x n smoother of OLS fit on the training rows, with zero columns elsewhere
  const Matrix xe = gather_rows(x, tt.train);
  const Matrix coef = (xe.transpose() * xe).ldlt().solve(xe.transpose());
  Matrix s = Matrix::Zero(n, n);
  const Matrix sp = x * coef;
  for (std::size_t j = 0; j < tt.train.size(); ++j) s.col(tt.train[j]) = sp.col(static_cast<Index>(j));
  Vector theta = Vector::Zero(n);
  for (Index i : tt.test) theta(i) = 1.0;
  CHECK(ols_correction_trace(x, sigma, tt.train, tt.test) ==
        doctest::Approx(correction_trace(s, sigma, theta)).epsilon(1e-9));
}

TEST_CASE("cv_mse averages per-fold held-out errors") {
  const Index n = 12;
  Matrix x = Matrix::Ones(n, 1);
  Vector y = Vector::LinSpaced(n, 0.0, 11.0);
  ModelContext base;
  base.x = x;
  ModelSpec spec;
  spec.kind = "tree";
  spec.depth = 0;
  const ModelFactory factory = [&](const IndexList& est) {
    ModelContext ctx = base;
    ctx.train = est;
    return make_model(spec, ctx);
  };
  const SplitPlan plan = kfold_splits(n, 3, 5);
  const CvEstimate cv = cv_mse(factory, plan, y, 1);
  REQUIRE(cv.per_fold.size() == 3);
  for (std::size_t f = 0; f < 3; ++f) {
    double m = 0.0;
    for (Index i : plan.pairs[f].est) m += y(i);
    m /= static_cast<double>(plan.pairs[f].est.size());
    double e = 0.0;
    for (Index i : plan.pairs[f].pred) e += (y(i) - m) * (y(i) - m);
    CHECK(cv.per_fold[f] == doctest::Approx(e / static_cast<double>(plan.pairs[f].pred.size())));
  }
  CHECK(cv.value == doctest::Approx((cv.per_fold[0] + cv.per_fold[1] + cv.per_fold[2]) / 3.0));
}

TEST_CASE("bias study: the target scheme has ratio one") {
  const Locations loc = Locations::grid(6, 6.0);
  Rng rng(1);
  Matrix x(36, 3);
  for (Index j = 0; j < 3; ++j) x.col(j) = standard_normal(36, rng);
  const Matrix sigma = build_sigma(loc, MaternSpec{0.1, 1.0, 0.5, 2.0});
  CvBiasStudy study;
  study.locations = &loc;
  study.x = &x;
  study.sigma_y = &sigma;
  study.reps = 5;
  study.seed = 3;
  const auto rows = cv_bias_study({{"kfold", 3}, {"target"}}, study);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].mean_ratio == 1.0);
  CHECK(rows[1].std_error == 0.0);
  CHECK(rows[0].reps == 5);
  CHECK_THROWS_AS(cv_bias_study({{"jackknife"}}, study), ConfigError);
}
