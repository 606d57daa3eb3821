#pragma once

#include "gencp/core.hpp"

#include <memory>
#include <string>

namespace gencp {

class RidgePath;

struct LassoResult {
  Vector beta;
  double intercept = 0.0;
  int sweeps = 0;

  IndexList support() const;
};

// Thrown when coordinate descent hits the sweep limit; carries the last iterate.
class LassoConvergenceError : public NumericalError {
 public:
  LassoConvergenceError(const std::string& what, LassoResult last) : NumericalError(what), last_(std::move(last)) {}
  const LassoResult& last_iterate() const { return last_; }

 private:
  LassoResult last_;
};

struct LassoOptions {
  double tolerance = 1e-7;
  int max_sweeps = 100000;
};

// Cyclic coordinate descent for
//   (2m)^{-1} ||y - b0 - X beta||^2 + lambda (l1_ratio ||beta||_1 + (1 - l1_ratio)/2 ||beta||^2)
// with covariance updates. The Gram matrix of the fitting design is cached so repeated solves
// on the same design (bootstrap loops, CV paths) only cost O(m p) for X^T y plus the sweeps.
// Convergence: largest coefficient move, scaled by the column norm, below
// tolerance * rms(centred y).
class LassoSolver {
 public:
  LassoSolver(const Matrix& x_fit, bool intercept, double l1_ratio = 1.0);

  LassoResult solve(const Vector& y_fit, double lambda, const LassoResult* warm = nullptr,
                    const LassoOptions& options = {}) const;
  Vector predict(const Matrix& x, const LassoResult& fit) const;

  Index features() const { return gram_.rows(); }
  Index fit_size() const { return xc_.rows(); }

 private:
  bool intercept_;
  double l1_ratio_;
  Eigen::RowVectorXd x_mean_;
  Matrix xc_;
  Matrix gram_; // xc^T xc / m
};

// Plain lasso without intercept on the given design.
Vector lasso_fit(const Matrix& x, const Vector& y, double lambda);

enum class PenaltyFamily { ridge, lasso, elastic_net };

struct CvTuneResult {
  PenaltyFamily family;
  double lambda = 0.0;
  std::vector<double> grid;
  std::vector<double> cv_mse; // one per grid value
};

// k-fold CV tuning of a penalized linear model on a fixed design. Fold labels come from the
// seed once, and the per-fold factorizations are cached, so repeated tune/predict calls on new
// responses only pay for the solves. The minimizing lambda wins; ties go to the smaller lambda.
class PenalizedCv {
 public:
  PenalizedCv(PenaltyFamily family, const Matrix& x_fit, const Matrix& x_pred, std::vector<double> grid, int k,
              std::uint64_t seed, bool intercept = true, double l1_ratio = 0.5);

  CvTuneResult tune(const Vector& y_fit) const;
  // Predictions at x_pred after refitting on all fitting rows at the tuned lambda.
  Vector predict(const Vector& y_fit, CvTuneResult* tuned = nullptr) const;

 private:
  struct Fold {
    IndexList est;
    IndexList pred;
    std::shared_ptr<const RidgePath> ridge;
    std::shared_ptr<const LassoSolver> lasso;
    Matrix x_pred;
  };

  PenaltyFamily family_;
  std::vector<double> grid_;
  std::vector<std::size_t> descending_;
  Index m_;
  std::vector<Fold> folds_;
  std::shared_ptr<const RidgePath> full_ridge_;
  std::shared_ptr<const LassoSolver> full_lasso_;
  Matrix x_pred_;
};

// One-off k-fold CV over the grid; same rules as PenalizedCv.
CvTuneResult cv_tune(PenaltyFamily family, const Matrix& x, const Vector& y, const std::vector<double>& grid, int k,
                     std::uint64_t seed, bool intercept = true, double l1_ratio = 0.5);

// m values logarithmically spaced on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace gencp
