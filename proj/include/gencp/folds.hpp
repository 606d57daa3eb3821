#pragma once

#include "gencp/core.hpp"
#include "gencp/rng.hpp"

namespace gencp {

// Random equal-size fold labels in [0, k) for m items; fold sizes differ by at most one.
inline std::vector<int> fold_labels(Index m, int k, std::uint64_t seed) {
  require(k >= 2 && k <= m, "fold_labels: need 2 <= k <= m");
  std::vector<int> labels(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % k);
  Rng rng(seed);
  shuffle(labels, rng);
  return labels;
}

}  // namespace gencp
