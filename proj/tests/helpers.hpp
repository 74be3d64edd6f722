// Shared fixtures: the worked two-point datasets and seeded random data.
#pragma once

#include <random>
#include <vector>

#include "revpref/core.hpp"

namespace revpref::testing {

// Mutual strict revealed preference: each agent's own bundle costs 101 while
// the other's costs 20 at the same prices. Violates HARP through the 2-cycle.
inline Dataset violating_pair() {
  return Dataset::from_pairs({{{10.0, 1.0}, {10.0, 1.0}},
                              {{1.0, 10.0}, {1.0, 10.0}}});
}

// Same numbers with the bundles swapped; the diagonal pairing is optimal.
inline Dataset satisfying_pair() {
  return Dataset::from_pairs({{{1.0, 10.0}, {10.0, 1.0}},
                              {{10.0, 1.0}, {1.0, 10.0}}});
}

// Two-point Cobb-Douglas demand data, alpha = (1/2, 1/2), income 2.
inline Dataset cobb_pair() {
  return Dataset::from_pairs({{{1.0, 1.0}, {1.0, 1.0}},
                              {{0.5, 1.0}, {2.0, 1.0}}});
}

// Coordinates log-uniform in [0.1, 10], the acceptance-suite distribution.
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n,
                              std::size_t m) {
  std::uniform_real_distribution<double> exponent(std::log(0.1),
                                                  std::log(10.0));
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> q(m), p(m);
    for (std::size_t k = 0; k < m; ++k) {
      q[k] = std::exp(exponent(rng));
      p[k] = std::exp(exponent(rng));
    }
    pairs.emplace_back(std::move(q), std::move(p));
  }
  return Dataset::from_pairs(pairs);
}

}  // namespace revpref::testing
