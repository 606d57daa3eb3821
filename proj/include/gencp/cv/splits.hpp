#pragma once

#include "gencp/core.hpp"
#include "gencp/gaussian/covariance.hpp"

#include <string>

namespace gencp {

struct SplitPair {
  IndexList est;  // E
  IndexList pred; // P
};

struct SplitPlan {
  std::string scheme;
  int k = 0;
  double buffer_radius = 0.0;
  std::vector<SplitPair> pairs;
  int dropped = 0; // BLOO pairs removed because E was empty

  // Re-expresses a plan built on a subset (local indices 0..|rows|-1) in global indices.
  SplitPlan mapped(const IndexList& rows) const;
  // CSV with columns pair,role,index.
  std::string to_csv() const;
};

SplitPlan kfold_splits(Index n, int k, std::uint64_t seed);
// Folds are k-means clusters of the locations: k-means++ seeding then 100 Lloyd iterations.
// A cluster that empties is reseeded at the point farthest from its current centroid.
SplitPlan spatial_kmeans_splits(const Locations& loc, int k, std::uint64_t seed);
// One pair per point: P = {i}, E = points farther than the radius from i. Pairs with empty E
// are dropped and counted.
SplitPlan bloo_splits(const Locations& loc, double buffer_radius);

// k-means labels in [0, k) (exposed for tests).
std::vector<int> kmeans_labels(const Matrix& points, int k, std::uint64_t seed, int iterations = 100);

struct TrainTest {
  IndexList train;
  IndexList test;
};

// Simple random sample of round(n p_tr) training points.
TrainTest random_split(Index n, double p_tr, std::uint64_t seed);

// Two-step clustered sample: the bounding square is cut into grid x grid sub-squares,
// ceil(2 p_tr grid^2) of them are drawn (all of them when that exceeds grid^2), and round(n p_tr)
// training points are drawn uniformly from the points inside the chosen sub-squares. The
// sub-square draw is repeated (up to 100 times) when they hold too few points; after that the
// split is reported as impossible.
TrainTest clustered_split(const Locations& loc, double p_tr, std::uint64_t seed, int grid = 5);

}  // namespace gencp
