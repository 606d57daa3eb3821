#include "gencp/models/lasso.hpp"

#include "gencp/folds.hpp"
#include "gencp/models/smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gencp {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

IndexList LassoResult::support() const {
  IndexList out;
  for (Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) out.push_back(j);
  return out;
}

LassoSolver::LassoSolver(const Matrix& x_fit, bool intercept, double l1_ratio)
    : intercept_(intercept), l1_ratio_(l1_ratio) {
  require(x_fit.rows() >= 1, "LassoSolver: empty design");
  require(l1_ratio > 0.0 && l1_ratio <= 1.0, "LassoSolver: l1_ratio must lie in (0, 1]");
  xc_ = x_fit;
  x_mean_ = Eigen::RowVectorXd::Zero(x_fit.cols());
  if (intercept_) {
    x_mean_ = x_fit.colwise().mean();
    xc_.rowwise() -= x_mean_;
  }
  gram_ = xc_.transpose() * xc_ / static_cast<double>(xc_.rows());
}

LassoResult LassoSolver::solve(const Vector& y_fit, double lambda, const LassoResult* warm,
                               const LassoOptions& options) const {
  require(lambda >= 0.0 && std::isfinite(lambda), "lasso: lambda must be >= 0");
  require(y_fit.size() == xc_.rows(), "lasso: response dimension mismatch");
  const Index p = gram_.rows();
  const double m = static_cast<double>(xc_.rows());
  double y_mean = intercept_ ? y_fit.mean() : 0.0;
  Vector yc = y_fit.array() - y_mean;
  const double scale = std::max(std::sqrt(yc.squaredNorm() / m), std::numeric_limits<double>::min());
  const double l1 = lambda * l1_ratio_;
  const double l2 = lambda * (1.0 - l1_ratio_);

  LassoResult res;
  res.beta = Vector::Zero(p);
  if (warm && warm->beta.size() == p) res.beta = warm->beta;
  Vector grad = xc_.transpose() * yc / m - gram_ * res.beta;

  auto sweep = [&](bool active_only) {
    double max_move = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double gjj = gram_(j, j);
      if (gjj <= 0.0) continue;
      const double old = res.beta(j);
      if (active_only && old == 0.0) continue;
      const double z = grad(j) + gjj * old;
      const double updated = soft_threshold(z, l1) / (gjj + l2);
      const double delta = updated - old;
      if (delta != 0.0) {
        grad.noalias() -= gram_.col(j) * delta;
        res.beta(j) = updated;
        max_move = std::max(max_move, std::abs(delta) * std::sqrt(gjj));
      }
    }
    ++res.sweeps;
    return max_move;
  };

  const double tol = options.tolerance * scale;
  for (;;) {
    if (res.sweeps >= options.max_sweeps) break;
    const double full = sweep(false);
    if (full < tol) {
      res.intercept = y_mean - x_mean_.dot(res.beta);
      return res;
    }
    while (res.sweeps < options.max_sweeps) {
      if (sweep(true) < tol) break;
    }
  }
  res.intercept = y_mean - x_mean_.dot(res.beta);
  throw LassoConvergenceError("lasso: coordinate descent did not converge", res);
}

Vector LassoSolver::predict(const Matrix& x, const LassoResult& fit) const {
  require(x.cols() == gram_.rows(), "lasso predict: feature dimension mismatch");
  Vector out = x * fit.beta;
  out.array() += fit.intercept;
  return out;
}

Vector lasso_fit(const Matrix& x, const Vector& y, double lambda) {
  return LassoSolver(x, false).solve(y, lambda).beta;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  require(lo > 0.0 && hi >= lo && count >= 1, "log_grid: invalid range");
  std::vector<double> g(static_cast<std::size_t>(count));
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) g[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  return g;
}

PenalizedCv::PenalizedCv(PenaltyFamily family, const Matrix& x_fit, const Matrix& x_pred, std::vector<double> grid,
                         int k, std::uint64_t seed, bool intercept, double l1_ratio)
    : family_(family), grid_(std::move(grid)), m_(x_fit.rows()), x_pred_(x_pred) {
  require(!grid_.empty(), "cv_tune: empty grid");
  for (double l : grid_) require(l >= 0.0 && std::isfinite(l), "cv_tune: invalid lambda in grid");
  require(x_fit.cols() == x_pred.cols(), "cv_tune: feature dimension mismatch");
  const double ratio = family == PenaltyFamily::lasso ? 1.0 : l1_ratio;
  std::vector<int> labels = fold_labels(m_, k, seed);

  // descending order so warm starts move along the path
  descending_.resize(grid_.size());
  for (std::size_t i = 0; i < descending_.size(); ++i) descending_[i] = i;
  std::stable_sort(descending_.begin(), descending_.end(),
                   [&](std::size_t a, std::size_t b) { return grid_[a] > grid_[b]; });

  for (int f = 0; f < k; ++f) {
    Fold fold;
    for (Index i = 0; i < m_; ++i) (labels[static_cast<std::size_t>(i)] == f ? fold.pred : fold.est).push_back(i);
    Matrix xe = gather_rows(x_fit, fold.est);
    fold.x_pred = gather_rows(x_fit, fold.pred);
    if (family == PenaltyFamily::ridge)
      fold.ridge = std::make_shared<RidgePath>(xe, fold.x_pred, intercept);
    else
      fold.lasso = std::make_shared<LassoSolver>(xe, intercept, ratio);
    folds_.push_back(std::move(fold));
  }
  if (family == PenaltyFamily::ridge)
    full_ridge_ = std::make_shared<RidgePath>(x_fit, x_pred, intercept);
  else
    full_lasso_ = std::make_shared<LassoSolver>(x_fit, intercept, ratio);
}

CvTuneResult PenalizedCv::tune(const Vector& y_fit) const {
  require(y_fit.size() == m_, "cv_tune: response dimension mismatch");
  std::vector<double> sse(grid_.size(), 0.0);
  for (const Fold& fold : folds_) {
    Vector ye = gather(y_fit, fold.est), yp = gather(y_fit, fold.pred);
    if (fold.ridge) {
      for (std::size_t g = 0; g < grid_.size(); ++g) sse[g] += (yp - fold.ridge->predict(ye, grid_[g])).squaredNorm();
    } else {
      LassoResult warm;
      bool have_warm = false;
      for (std::size_t g : descending_) {
        LassoResult fit = fold.lasso->solve(ye, grid_[g], have_warm ? &warm : nullptr);
        sse[g] += (yp - fold.lasso->predict(fold.x_pred, fit)).squaredNorm();
        warm = std::move(fit);
        have_warm = true;
      }
    }
  }
  CvTuneResult out;
  out.family = family_;
  out.grid = grid_;
  out.cv_mse.resize(grid_.size());
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    out.cv_mse[g] = sse[g] / static_cast<double>(m_);
    if (out.cv_mse[g] < out.cv_mse[best] || (out.cv_mse[g] == out.cv_mse[best] && grid_[g] < grid_[best])) best = g;
  }
  out.lambda = grid_[best];
  return out;
}

Vector PenalizedCv::predict(const Vector& y_fit, CvTuneResult* tuned) const {
  CvTuneResult t = tune(y_fit);
  Vector out;
  if (full_ridge_) {
    out = full_ridge_->predict(y_fit, t.lambda);
  } else {
    out = full_lasso_->predict(x_pred_, full_lasso_->solve(y_fit, t.lambda));
  }
  if (tuned) *tuned = std::move(t);
  return out;
}

CvTuneResult cv_tune(PenaltyFamily family, const Matrix& x, const Vector& y, const std::vector<double>& grid, int k,
                     std::uint64_t seed, bool intercept, double l1_ratio) {
  require(x.rows() == y.size(), "cv_tune: dimension mismatch");
  return PenalizedCv(family, x, x, grid, k, seed, intercept, l1_ratio).tune(y);
}

}  // namespace gencp
