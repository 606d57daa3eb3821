#include "gencp/cv/splits.hpp"

#include "gencp/folds.hpp"
#include "gencp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gencp {

SplitPlan SplitPlan::mapped(const IndexList& rows) const {
  SplitPlan out = *this;
  auto map = [&](IndexList& idx) {
    for (Index& i : idx) {
      require(i >= 0 && static_cast<std::size_t>(i) < rows.size(), "SplitPlan::mapped: index out of range");
      i = rows[static_cast<std::size_t>(i)];
    }
  };
  for (SplitPair& p : out.pairs) {
    map(p.est);
    map(p.pred);
  }
  return out;
}

std::string SplitPlan::to_csv() const {
  std::ostringstream os;
  os << "pair,role,index\n";
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (Index i : pairs[p].est) os << p << ",E," << i << "\n";
    for (Index i : pairs[p].pred) os << p << ",P," << i << "\n";
  }
  return os.str();
}

namespace {

SplitPlan plan_from_labels(const std::vector<int>& labels, int k, std::string scheme) {
  SplitPlan plan;
  plan.scheme = std::move(scheme);
  plan.k = k;
  plan.pairs.resize(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      auto& pair = plan.pairs[static_cast<std::size_t>(f)];
      (labels[i] == f ? pair.pred : pair.est).push_back(static_cast<Index>(i));
    }
  }
  return plan;
}

}  // namespace

SplitPlan kfold_splits(Index n, int k, std::uint64_t seed) {
  require(k >= 2 && k <= n, "kfold_splits: need 2 <= k <= n");
  return plan_from_labels(fold_labels(n, k, seed), k, "kfold");
}

std::vector<int> kmeans_labels(const Matrix& points, int k, std::uint64_t seed, int iterations) {
  const Index n = points.rows();
  require(k >= 1 && k <= n, "kmeans: need 1 <= k <= n");
  Rng rng(seed);
  Matrix centres(k, points.cols());
  centres.row(0) = points.row(uniform_index(rng, n));
  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = (points.row(i) - centres.row(0)).squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total <= 0.0) {
      pick = uniform_index(rng, n);
    } else {
      double u = uniform(rng, 0.0, total), acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (u < acc) {
          pick = i;
          break;
        }
      }
    }
    centres.row(c) = points.row(pick);
    for (Index i = 0; i < n; ++i) d2(i) = std::min(d2(i), (points.row(i) - centres.row(c)).squaredNorm());
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  auto assign = [&] {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centres.row(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) changed = true;
      labels[static_cast<std::size_t>(i)] = best;
    }
    return changed;
  };
  assign();
  for (int it = 0; it < iterations; ++it) {
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) centres.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index far = 0;
      double fd = -1.0;
      for (Index i = 0; i < n; ++i) {
        const double d = (points.row(i) - centres.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
        if (counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] > 1 && d > fd) {
          fd = d;
          far = i;
        }
      }
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      centres.row(c) = points.row(far);
    }
    if (!assign() && it > 0) break;
  }
  return labels;
}

SplitPlan spatial_kmeans_splits(const Locations& loc, int k, std::uint64_t seed) {
  require(k >= 2 && k <= loc.size(), "spatial_kmeans_splits: need 2 <= k <= n");
  std::vector<int> labels = kmeans_labels(loc.points(), k, seed);
  SplitPlan plan = plan_from_labels(labels, k, "spatial");
  // identical points can leave a cluster empty after the final assignment
  std::vector<SplitPair> kept;
  for (auto& p : plan.pairs)
    if (!p.pred.empty()) kept.push_back(std::move(p));
  plan.pairs = std::move(kept);
  return plan;
}

SplitPlan bloo_splits(const Locations& loc, double buffer_radius) {
  require(buffer_radius >= 0.0 && std::isfinite(buffer_radius), "bloo_splits: buffer radius must be >= 0");
  SplitPlan plan;
  plan.scheme = "bloo";
  plan.k = static_cast<int>(loc.size());
  plan.buffer_radius = buffer_radius;
  for (Index i = 0; i < loc.size(); ++i) {
    SplitPair pair;
    pair.pred.push_back(i);
    for (Index j = 0; j < loc.size(); ++j)
      if (j != i && loc.distance(i, j) > buffer_radius) pair.est.push_back(j);
    if (pair.est.empty()) {
      ++plan.dropped;
      continue;
    }
    plan.pairs.push_back(std::move(pair));
  }
  return plan;
}

TrainTest random_split(Index n, double p_tr, std::uint64_t seed) {
  require(p_tr > 0.0 && p_tr < 1.0, "random_split: p_tr must lie in (0, 1)");
  const auto m = static_cast<Index>(std::llround(static_cast<double>(n) * p_tr));
  require(m >= 1 && m < n, "random_split: training set would be empty or cover every point");
  IndexList order = iota_indices(n);
  Rng rng(seed);
  shuffle(order, rng);
  TrainTest out;
  out.train.assign(order.begin(), order.begin() + m);
  std::sort(out.train.begin(), out.train.end());
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Index i : out.train) in[static_cast<std::size_t>(i)] = 1;
  for (Index i = 0; i < n; ++i)
    if (!in[static_cast<std::size_t>(i)]) out.test.push_back(i);
  return out;
}

TrainTest clustered_split(const Locations& loc, double p_tr, std::uint64_t seed, int grid) {
  require(p_tr > 0.0 && p_tr < 1.0, "clustered_split: p_tr must lie in (0, 1)");
  require(grid >= 1, "clustered_split: grid must be >= 1");
  require(loc.dim() >= 2, "clustered_split: needs 2-d locations");
  const Index n = loc.size();
  const auto m = static_cast<Index>(std::llround(static_cast<double>(n) * p_tr));
  require(m >= 1 && m < n, "clustered_split: training set would be empty or cover every point");

  const Matrix& pts = loc.points();
  const double x0 = pts.col(0).minCoeff(), y0 = pts.col(1).minCoeff();
  const double side = std::max(pts.col(0).maxCoeff() - x0, pts.col(1).maxCoeff() - y0);
  if (!(side > 0.0)) throw NumericalError("clustered_split: all locations fall in a single sub-square");
  const int cells = grid * grid;
  std::vector<int> cell_of(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto bin = [&](double v, double lo) {
      return std::clamp(static_cast<int>(std::floor((v - lo) / side * grid)), 0, grid - 1);
    };
    cell_of[static_cast<std::size_t>(i)] = bin(pts(i, 0), x0) * grid + bin(pts(i, 1), y0);
  }
  const int chosen = std::clamp(static_cast<int>(std::ceil(2.0 * p_tr * cells - 1e-9)), 1, cells);

  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> order(static_cast<std::size_t>(cells));
    for (int c = 0; c < cells; ++c) order[static_cast<std::size_t>(c)] = c;
    shuffle(order, rng);
    std::vector<char> picked(static_cast<std::size_t>(cells), 0);
    for (int c = 0; c < chosen; ++c) picked[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])] = 1;
    IndexList pool;
    for (Index i = 0; i < n; ++i)
      if (picked[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(i)])]) pool.push_back(i);
    if (static_cast<Index>(pool.size()) < m) continue;
    shuffle(pool, rng);
    TrainTest out;
    out.train.assign(pool.begin(), pool.begin() + m);
    std::sort(out.train.begin(), out.train.end());
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    for (Index i : out.train) in[static_cast<std::size_t>(i)] = 1;
    for (Index i = 0; i < n; ++i)
      if (!in[static_cast<std::size_t>(i)]) out.test.push_back(i);
    return out;
  }
  throw NumericalError("clustered_split: selected sub-squares never held enough points after 100 draws");
}

}  // namespace gencp
