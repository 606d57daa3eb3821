#pragma once

#include "gencp/core.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gencp {

using Rng = std::mt19937_64;

// Stream identifiers used when deriving child seeds from a master seed.
enum class Stream : std::uint64_t {
  data = 1,
  fission = 2,
  bag = 3,
  cv_folds = 4,
  split = 5,
  truth = 6,
  bootstrap = 7,
  design = 8,
  model = 9,
  kmeans = 10,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic child seed: folds each component into the master through splitmix64.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, Stream s, std::initializer_list<std::uint64_t> path = {}) {
  std::uint64_t h = derive_seed(master, {static_cast<std::uint64_t>(s)});
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
  return h;
}

inline Vector standard_normal(Index n, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = dist(rng);
  return z;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Uniform index in [0, n).
inline Index uniform_index(Rng& rng, Index n) {
  return static_cast<Index>(std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng));
}

// Fisher-Yates with our own index draws so permutations do not depend on std::shuffle internals.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(uniform_index(rng, static_cast<Index>(i)));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace gencp
