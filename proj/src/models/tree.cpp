#include "gencp/models/tree.hpp"

#include <algorithm>
#include <numeric>

namespace gencp {

int RegressionTree::leaf_of(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int node = 0;
  while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& nd = nodes_[static_cast<std::size_t>(node)];
    node = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
  }
  return nodes_[static_cast<std::size_t>(node)].leaf;
}

int RegressionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& nd = nodes_[i];
    if (nd.feature >= 0) {
      d[static_cast<std::size_t>(nd.left)] = d[i] + 1;
      d[static_cast<std::size_t>(nd.right)] = d[i] + 1;
    }
    best = std::max(best, d[i]);
  }
  return best;
}

Vector RegressionTree::predict(const Matrix& x) const {
  std::vector<double> leaf_value(static_cast<std::size_t>(leaf_count_), 0.0);
  for (const TreeNode& nd : nodes_)
    if (nd.leaf >= 0) leaf_value[static_cast<std::size_t>(nd.leaf)] = nd.value;
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) out(i) = leaf_value[static_cast<std::size_t>(leaf_of(x.row(i)))];
  return out;
}

Matrix RegressionTree::smoother(const Matrix& x) const {
  std::vector<double> leaf_weight(static_cast<std::size_t>(leaf_count_), 0.0);
  for (std::size_t j = 0; j < fit_leaf_.size(); ++j)
    if (fit_leaf_[j] >= 0) leaf_weight[static_cast<std::size_t>(fit_leaf_[j])] += fit_weight_[j];
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(leaf_count_));
  for (std::size_t j = 0; j < fit_leaf_.size(); ++j)
    if (fit_leaf_[j] >= 0) members[static_cast<std::size_t>(fit_leaf_[j])].push_back(static_cast<Index>(j));

  Matrix s = Matrix::Zero(x.rows(), static_cast<Index>(fit_leaf_.size()));
  for (Index i = 0; i < x.rows(); ++i) {
    const auto leaf = static_cast<std::size_t>(leaf_of(x.row(i)));
    for (Index j : members[leaf]) s(i, j) = fit_weight_[static_cast<std::size_t>(j)] / leaf_weight[leaf];
  }
  return s;
}

TreeFitter::TreeFitter(const Matrix& x_fit, int max_depth, double min_leaf)
    : x_(x_fit), max_depth_(max_depth), min_leaf_(min_leaf) {
  require(x_fit.rows() >= 1, "TreeFitter: empty design");
  require(max_depth >= 0, "TreeFitter: max_depth must be >= 0");
  require(min_leaf > 0.0, "TreeFitter: min_leaf must be > 0");
  require(x_fit.allFinite(), "TreeFitter: non-finite feature");
  order_.resize(static_cast<std::size_t>(x_.cols()));
  for (Index f = 0; f < x_.cols(); ++f) {
    auto& ord = order_[static_cast<std::size_t>(f)];
    ord.resize(static_cast<std::size_t>(x_.rows()));
    std::iota(ord.begin(), ord.end(), Index{0});
    std::stable_sort(ord.begin(), ord.end(), [&](Index a, Index b) { return x_(a, f) < x_(b, f); });
  }
}

namespace {

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct Accumulator {
  double w = 0.0;
  double s = 0.0;
  double last_x = 0.0;
  bool started = false;
};

}  // namespace

RegressionTree TreeFitter::fit(const Vector& y_fit, const Vector* weights) const {
  const Index m = x_.rows();
  require(y_fit.size() == m, "TreeFitter: response dimension mismatch");
  require(y_fit.allFinite(), "TreeFitter: non-finite response");
  Vector wts = weights ? *weights : Vector::Ones(m);
  require(wts.size() == m && (wts.array() >= 0.0).all(), "TreeFitter: invalid weights");
  require(wts.sum() > 0.0, "TreeFitter: all weights are zero");

  RegressionTree tree;
  std::vector<int> node_of(static_cast<std::size_t>(m), 0);
  for (Index i = 0; i < m; ++i)
    if (wts(i) == 0.0) node_of[static_cast<std::size_t>(i)] = -1;

  auto& nodes = tree.nodes_;
  nodes.emplace_back();
  std::vector<double> sum_w(1, 0.0), sum_s(1, 0.0), sum_ss(1, 0.0);
  for (Index i = 0; i < m; ++i) {
    sum_w[0] += wts(i);
    sum_s[0] += wts(i) * y_fit(i);
    sum_ss[0] += wts(i) * y_fit(i) * y_fit(i);
  }

  std::vector<int> frontier{0};
  for (int level = 0; level < max_depth_ && !frontier.empty(); ++level) {
    // slot for each node id in the frontier
    std::vector<int> slot(nodes.size(), -1);
    for (std::size_t k = 0; k < frontier.size(); ++k) slot[static_cast<std::size_t>(frontier[k])] = static_cast<int>(k);
    std::vector<SplitCandidate> best(frontier.size());

    for (Index f = 0; f < x_.cols(); ++f) {
      std::vector<Accumulator> acc(frontier.size());
      for (Index row : order_[static_cast<std::size_t>(f)]) {
        const int node = node_of[static_cast<std::size_t>(row)];
        if (node < 0) continue;
        const int k = slot[static_cast<std::size_t>(node)];
        if (k < 0) continue;
        Accumulator& a = acc[static_cast<std::size_t>(k)];
        const double xv = x_(row, f);
        if (a.started && xv > a.last_x) {
          const double wt = sum_w[static_cast<std::size_t>(node)], st = sum_s[static_cast<std::size_t>(node)];
          const double rw = wt - a.w;
          if (a.w >= min_leaf_ && rw >= min_leaf_) {
            const double rs = st - a.s;
            const double gain = a.s * a.s / a.w + rs * rs / rw - st * st / wt;
            SplitCandidate& b = best[static_cast<std::size_t>(k)];
            if (gain > b.gain) b = {gain, static_cast<int>(f), 0.5 * (a.last_x + xv)};
          }
        }
        a.w += wts(row);
        a.s += wts(row) * y_fit(row);
        a.last_x = xv;
        a.started = true;
      }
    }

    std::vector<int> next;
    for (std::size_t k = 0; k < frontier.size(); ++k) {
      const int node = frontier[k];
      const auto nu = static_cast<std::size_t>(node);
      const double sse = sum_ss[nu] - sum_s[nu] * sum_s[nu] / sum_w[nu];
      const SplitCandidate& b = best[k];
      if (b.feature < 0 || b.gain <= 1e-12 * std::max(sum_ss[nu], 1e-300) || sse <= 0.0) continue;
      const int left = static_cast<int>(nodes.size());
      const int right = left + 1;
      nodes[nu].feature = b.feature;
      nodes[nu].threshold = b.threshold;
      nodes[nu].left = left;
      nodes[nu].right = right;
      nodes.emplace_back();
      nodes.emplace_back();
      sum_w.resize(nodes.size(), 0.0);
      sum_s.resize(nodes.size(), 0.0);
      sum_ss.resize(nodes.size(), 0.0);
      next.push_back(left);
      next.push_back(right);
    }
    if (next.empty()) break;
    for (Index i = 0; i < m; ++i) {
      int& node = node_of[static_cast<std::size_t>(i)];
      if (node < 0) continue;
      const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
      if (nd.feature < 0) continue;
      node = x_(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
      const auto c = static_cast<std::size_t>(node);
      sum_w[c] += wts(i);
      sum_s[c] += wts(i) * y_fit(i);
      sum_ss[c] += wts(i) * y_fit(i) * y_fit(i);
    }
    frontier = std::move(next);
  }

  int leaves = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].weight = sum_w[i];
    nodes[i].value = sum_w[i] > 0.0 ? sum_s[i] / sum_w[i] : 0.0;
    if (nodes[i].feature < 0) nodes[i].leaf = leaves++;
  }
  tree.leaf_count_ = leaves;
  tree.fit_leaf_.assign(static_cast<std::size_t>(m), -1);
  tree.fit_weight_.assign(static_cast<std::size_t>(m), 0.0);
  for (Index i = 0; i < m; ++i) {
    const int node = node_of[static_cast<std::size_t>(i)];
    tree.fit_weight_[static_cast<std::size_t>(i)] = wts(i);
    if (node >= 0) tree.fit_leaf_[static_cast<std::size_t>(i)] = nodes[static_cast<std::size_t>(node)].leaf;
  }
  return tree;
}

}  // namespace gencp
