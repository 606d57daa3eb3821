#pragma once

#include "gencp/core.hpp"

namespace gencp {

struct TreeNode {
  int feature = -1; // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // weighted mean of the fitting response in the node
  double weight = 0.0; // total fitting weight in the node
  int leaf = -1;       // leaf id for leaves
};

// Fitted regression tree. Rows with x[feature] <= threshold go left.
class RegressionTree {
 public:
  int leaf_of(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  int leaf_count() const { return leaf_count_; }
  int depth() const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }

  Vector predict(const Matrix& x) const;
  // Rows: prediction points x; columns: the fitting rows (in fitting order). Entry (i, j) is
  // w_j / W_leaf when fitting row j shares the leaf of x_i, else 0. Rows sum to 1.
  Matrix smoother(const Matrix& x) const;

 private:
  friend class TreeFitter;
  std::vector<TreeNode> nodes_;
  std::vector<int> fit_leaf_;     // leaf of every fitting row (-1 when its weight is 0)
  std::vector<double> fit_weight_;
  int leaf_count_ = 0;
};

// Greedy CART regression tree fitter bound to a fixed fitting design. Feature orders are
// sorted once at construction so each fit costs O(depth * p * m).
//
// Split search is exhaustive over midpoints between consecutive distinct feature values;
// the criterion is weighted variance (SSE) reduction; ties keep the lowest feature index and
// then the lowest threshold. Nodes stop splitting at max_depth, when the gain is not positive,
// or when either child would carry less than min_leaf weight.
class TreeFitter {
 public:
  TreeFitter(const Matrix& x_fit, int max_depth, double min_leaf = 1.0);

  // weights: optional nonnegative per-row weights (bootstrap multiplicities).
  RegressionTree fit(const Vector& y_fit, const Vector* weights = nullptr) const;

  Index fit_size() const { return x_.rows(); }

 private:
  Matrix x_;
  int max_depth_;
  double min_leaf_;
  std::vector<std::vector<Index>> order_; // per feature, rows sorted by value
};

}  // namespace gencp
