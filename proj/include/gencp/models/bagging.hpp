#pragma once

#include "gencp/fission/fission.hpp"
#include "gencp/models/model.hpp"

#include <functional>

namespace gencp {

// Column k holds the base model's predictions from fission draw k, applied to Y or W_k
// depending on the refit mode.
struct BagPredictions {
  Matrix predictions; // n x K
  RefitMode refit = RefitMode::w;
  double alpha = 1.0;

  Index size() const { return predictions.cols(); }
  Vector mean() const { return predictions.rowwise().mean(); }
};

using DrawVisitor = std::function<void(int k, const FissionDraw& draw, const Fit& fit)>;

// K independent fission draws of y; draw k uses derive_seed(seed, Stream::bag, {k}).
// The visitor, when set, sees every draw and fit in order of k.
BagPredictions bagged_fit(const Model& base, const Vector& y, const GaussianSampler& noise, double alpha, int k,
                          RefitMode refit, std::uint64_t seed, const DrawVisitor& visitor = {});

}  // namespace gencp
