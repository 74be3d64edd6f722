#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "revpref/core.hpp"

using namespace revpref;

TEST_CASE("inner product matches direct arithmetic") {
  CHECK(inner(Bundle({1.0, 1.0}), PriceVector({1.0, 1.0})) == 2.0);
  CHECK(inner(Bundle({10.0, 1.0}), PriceVector({10.0, 1.0})) == 101.0);
  CHECK(inner(Bundle({0.5, 1.0}), PriceVector({2.0, 1.0})) == 2.0);
}

TEST_CASE("inner rejects dimension mismatch") {
  CHECK_THROWS_AS(inner(Bundle({1.0}), PriceVector({1.0, 2.0})), InputError);
  CHECK_THROWS_AS(log_cost(Bundle({1.0, 2.0, 3.0}), PriceVector({1.0})),
                  InputError);
}

TEST_CASE("log cost on the worked values") {
  CHECK(log_cost(Bundle({1.0, 1.0}), PriceVector({1.0, 1.0})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const double v = log_cost(Bundle({10.0, 1.0}), PriceVector({10.0, 1.0}));
  CHECK(v == doctest::Approx(std::log(101.0)).epsilon(1e-15));
  CHECK(v == doctest::Approx(4.61512).epsilon(1e-5));
}

TEST_CASE("log cost is additive under bundle scaling") {
  std::mt19937_64 rng(20240811);
  std::uniform_real_distribution<double> coord(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> q(3), p(3);
    for (auto* v : {&q, &p}) {
      for (double& c : *v) c = coord(rng);
    }
    const Bundle x(q);
    const PriceVector price(p);
    const double base = log_cost(x, price);
    for (double t : {0.5, 2.0, 10.0}) {
      CHECK(log_cost(x.scaled(t), price) - base ==
            doctest::Approx(std::log(t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("inner is invariant under a joint coordinate permutation") {
  const Bundle x({1.0, 2.0, 3.0});
  const PriceVector p({5.0, 7.0, 11.0});
  const Bundle xp({3.0, 1.0, 2.0});
  const PriceVector pp({11.0, 5.0, 7.0});
  CHECK(inner(x, p) == inner(xp, pp));
}

TEST_CASE("nonpositive coordinates are rejected at construction") {
  CHECK_THROWS_AS(Bundle({1.0, 0.0}), InputError);
  CHECK_THROWS_AS(Bundle({-1.0, 2.0}), InputError);
  CHECK_THROWS_AS(Bundle({}), InputError);
  CHECK_THROWS_AS(PriceVector({0.0}), InputError);
  CHECK_THROWS_AS(PriceVector({1.0, -3.0}), InputError);
}

TEST_CASE("dataset validates shared dimension and index order") {
  CHECK_THROWS_AS(Dataset::from_pairs({{{1.0, 1.0}, {1.0}}}), InputError);
  CHECK_THROWS_AS(
      Dataset::from_pairs({{{1.0, 1.0}, {1.0, 1.0}}, {{1.0}, {1.0}}}),
      InputError);
  std::vector<Observation> bad;
  bad.push_back({1, Bundle({1.0}), PriceVector({1.0})});
  CHECK_THROWS_AS(Dataset(std::move(bad)), InputError);
}

TEST_CASE("standard kernel is bi-homogeneous on sampled vectors") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(0.1, 10.0);
  const Kernel& b = Kernel::standard_inner();
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> q(4), p(4);
    for (auto* v : {&q, &p}) {
      for (double& c : *v) c = coord(rng);
    }
    const Bundle x(q);
    const PriceVector y(p);
    for (double t : {0.25, 3.0}) {
      CHECK(b(x.scaled(t), y) ==
            doctest::Approx(t * b(x, y)).epsilon(1e-13));
      CHECK(b(x, y.scaled(t)) ==
            doctest::Approx(t * b(x, y)).epsilon(1e-13));
    }
  }
}
