#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "revpref/fields.hpp"
#include "revpref/utility.hpp"

using namespace revpref;
using revpref::testing::cobb_pair;
using revpref::testing::random_dataset;
using revpref::testing::violating_pair;

TEST_CASE("shortest path potentials on the worked datasets") {
  SUBCASE("single observation") {
    const CrossLogMatrix a =
        CrossLogMatrix::build(Dataset::from_pairs({{{1.0, 1.0}, {1.0, 1.0}}}));
    CHECK(shortest_path_potentials(a) == std::vector<double>{0.0});
  }
  SUBCASE("two-point Cobb-Douglas data: v = (0, ln 0.75)") {
    const CrossLogMatrix a = CrossLogMatrix::build(cobb_pair());
    CHECK(a.at(0, 1) == doctest::Approx(std::log(1.5 / 2.0)).epsilon(1e-14));
    CHECK(a.at(1, 0) == doctest::Approx(std::log(3.0 / 2.0)).epsilon(1e-14));
    const std::vector<double> v = shortest_path_potentials(a);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(std::log(0.75)).epsilon(1e-14));
  }
  SUBCASE("duplicated observations give zero potentials") {
    const Dataset dup = Dataset::from_pairs({{{1.0, 2.0}, {3.0, 4.0}},
                                             {{1.0, 2.0}, {3.0, 4.0}}});
    const std::vector<double> v =
        shortest_path_potentials(CrossLogMatrix::build(dup));
    CHECK(v == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("negative cycle is rejected with the witness attached") {
    const CrossLogMatrix a = CrossLogMatrix::build(violating_pair());
    CHECK_THROWS_AS(shortest_path_potentials(a), HarpViolationError);
    try {
      shortest_path_potentials(a);
    } catch (const HarpViolationError& e) {
      CHECK(e.verdict.cycle == std::vector<int>{0, 1});
    }
  }
}

TEST_CASE("potential inequalities hold on rationalizable data") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = gen_cobb_douglas(2 + trial % 6, 3, {0.5, 0.2, 0.3},
                                          {0.5, 2.0}, {1.0, 10.0}, rng());
    const CrossLogMatrix a = CrossLogMatrix::build(data);
    const std::vector<double> v = shortest_path_potentials(a);
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t j = 0; j < data.size(); ++j) {
        CHECK(v[j] - v[i] <= a.at(i, j) + 1e-12);
      }
    }
  }
}

TEST_CASE("homogeneous utility reproduces the worked values") {
  const HomogeneousUtility model = HomogeneousUtility::build(cobb_pair());
  CHECK(model.value(Bundle({1.0, 1.0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.value(Bundle({0.5, 1.0})) ==
        doctest::Approx(0.75).epsilon(1e-12));

  SUBCASE("n = 1: u(z) = <z, P> / <X, P>") {
    const HomogeneousUtility one =
        HomogeneousUtility::build(Dataset::from_pairs({{{1.0, 1.0}, {1.0, 1.0}}}));
    CHECK(one.value(Bundle({1.0, 1.0})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one.value(Bundle({2.0, 2.0})) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("build refuses HARP-violating data") {
    CHECK_THROWS_AS(HomogeneousUtility::build(violating_pair()),
                    HarpViolationError);
  }
}

TEST_CASE("u(X^i) equals exp(v_i) at every data point") {
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset data =
        gen_ces(2 + trial % 5, 3, -1.5, {1.0, 2.0, 0.5}, {0.5, 2.0},
                {1.0, 10.0}, rng());
    const HomogeneousUtility model = HomogeneousUtility::build(data);
    for (std::size_t i = 0; i < data.size(); ++i) {
      CHECK(model.value(data[i].bundle) ==
            doctest::Approx(std::exp(model.potentials()[i])).epsilon(1e-12));
    }
  }
}

TEST_CASE("homogeneity and concavity of the evaluated utility") {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> coord(0.1, 10.0), lam(0.0, 1.0);
  const Dataset data =
      gen_cobb_douglas(5, 3, {0.3, 0.3, 0.4}, {0.5, 2.0}, {1.0, 10.0}, 11);
  const HomogeneousUtility model = HomogeneousUtility::build(data);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<double> za(3), zb(3);
    for (double& c : za) c = coord(rng);
    for (double& c : zb) c = coord(rng);
    const Bundle a(za), b(zb);
    for (double t : {0.1, 1.0, 7.0}) {
      CHECK(model.value(a.scaled(t)) ==
            doctest::Approx(t * model.value(a)).epsilon(1e-12));
    }
    const double l = lam(rng);
    std::vector<double> mix(3);
    for (std::size_t k = 0; k < 3; ++k) mix[k] = l * za[k] + (1.0 - l) * zb[k];
    CHECK(model.value(Bundle(mix)) >=
          l * model.value(a) + (1.0 - l) * model.value(b) - 1e-12);
  }
}

TEST_CASE("verification accepts built models and rejects corrupted ones") {
  const HomogeneousUtility model = HomogeneousUtility::build(cobb_pair());
  const VerificationReport ok = verify_rationalization(model, 1000, 1e-9, 7);
  CHECK(ok.passed);
  CHECK(ok.max_violation <= 1e-9);

  // Raising one potential breaks the inequalities; only sampling catches it
  // because the data points still verify.
  std::vector<double> corrupted = model.potentials();
  corrupted[1] += 1.0;
  const HomogeneousUtility bad(cobb_pair(), Kernel::standard_inner(),
                               corrupted);
  const VerificationReport fail = verify_rationalization(bad, 1000, 1e-9, 7);
  CHECK_FALSE(fail.passed);
  CHECK(fail.max_violation > 1e-3);

  SUBCASE("single-point models verify for any sample") {
    const HomogeneousUtility one = HomogeneousUtility::build(
        Dataset::from_pairs({{{2.0, 1.0}, {1.0, 3.0}}}));
    CHECK(verify_rationalization(one, 500, 1e-9, 3).passed);
  }
}

TEST_CASE("serial and parallel verification agree bit for bit") {
  const Dataset data =
      gen_cobb_douglas(6, 4, {0.1, 0.2, 0.3, 0.4}, {0.5, 2.0}, {1.0, 10.0}, 5);
  const HomogeneousUtility model = HomogeneousUtility::build(data);
  const VerificationReport s =
      verify_rationalization_serial(model, 400, 1e-9, 99);
  const VerificationReport p =
      verify_rationalization_parallel(model, 400, 1e-9, 99);
  CHECK(s.max_violation == p.max_violation);
  CHECK(s.worst_observation == p.worst_observation);
  CHECK(s.passed == p.passed);
}

TEST_CASE("superdifferential containment tracks verification") {
  const HomogeneousUtility model = HomogeneousUtility::build(cobb_pair());
  CHECK(check_superdifferential(model, 500, 1e-9, 21));

  std::vector<double> corrupted = model.potentials();
  corrupted[1] += 1.0;
  const HomogeneousUtility bad(cobb_pair(), Kernel::standard_inner(),
                               corrupted);
  CHECK_FALSE(check_superdifferential(bad, 500, 1e-9, 21));

  const HomogeneousUtility one =
      HomogeneousUtility::build(Dataset::from_pairs({{{1.0}, {2.0}}}));
  CHECK(check_superdifferential(one, 200, 1e-9, 2));
}

TEST_CASE("afriat bridge reproduces the worked numbers") {
  const HomogeneousUtility model = HomogeneousUtility::build(cobb_pair());
  const AfriatSolution raw = afriat_from_homogeneous(model, false);
  CHECK(raw.levels[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(raw.levels[1] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(raw.multipliers[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(raw.multipliers[1] == doctest::Approx(0.375).epsilon(1e-12));
  // The two inequalities, by direct substitution:
  //   y2 - y1 = -0.25 <= s1 <P1, X2 - X1> = 0.5 * (-0.5)
  //   y1 - y2 =  0.25 <= s2 <P2, X1 - X2> = 0.375 * 1
  CHECK(raw.max_violation(cobb_pair()) <= 1e-12);

  const AfriatSolution norm = afriat_from_homogeneous(model);
  CHECK(*std::min_element(norm.multipliers.begin(), norm.multipliers.end()) >=
        1.0);
  CHECK(norm.max_violation(cobb_pair()) <= 1e-9);

  SUBCASE("n = 1") {
    const HomogeneousUtility one = HomogeneousUtility::build(
        Dataset::from_pairs({{{2.0, 1.0}, {1.0, 1.0}}}));
    const AfriatSolution s = afriat_from_homogeneous(one, false);
    CHECK(s.levels[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.multipliers[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("duplicated observations hold with equality") {
    const Dataset dup = Dataset::from_pairs({{{1.0, 2.0}, {2.0, 1.0}},
                                             {{1.0, 2.0}, {2.0, 1.0}}});
    const AfriatSolution s =
        afriat_from_homogeneous(HomogeneousUtility::build(dup), false);
    CHECK(s.levels[0] == s.levels[1]);
    CHECK(s.max_violation(dup) <= 1e-15);
  }
}

TEST_CASE("afriat bridge is feasible whenever HARP holds") {
  std::mt19937_64 rng(1001);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset data = gen_cobb_douglas(2 + trial % 6, 2, {0.6, 0.4},
                                          {0.5, 2.0}, {1.0, 10.0}, rng());
    const AfriatSolution s =
        afriat_from_homogeneous(HomogeneousUtility::build(data));
    CHECK(s.max_violation(data) <= 1e-9);
    for (double mult : s.multipliers) CHECK(mult >= 1.0 - 1e-15);
  }
}

TEST_CASE("afriat_solve on the worked datasets") {
  SUBCASE("n = 1 is trivially feasible with y = 0, s = 1") {
    const AfriatSolveResult r =
        afriat_solve(Dataset::from_pairs({{{1.0, 1.0}, {1.0, 1.0}}}));
    REQUIRE(r.feasible);
    CHECK(r.solution->levels == std::vector<double>{0.0});
    CHECK(r.solution->multipliers == std::vector<double>{1.0});
  }
  SUBCASE("Cobb-Douglas pair is feasible") {
    const AfriatSolveResult r = afriat_solve(cobb_pair());
    REQUIRE(r.feasible);
    CHECK(r.solution->max_violation(cobb_pair()) <= 1e-8);
  }
  SUBCASE("violating pair is infeasible") {
    const AfriatSolveResult r = afriat_solve(violating_pair());
    CHECK_FALSE(r.feasible);
    CHECK(r.phase1_objective > kDefaultTolerance);
  }
}

TEST_CASE("afriat_solve feasibility equals GARP on random data") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> n_dist(2, 7), m_dist(2, 4);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Dataset data = trial % 2 == 0
                       ? random_dataset(rng, n_dist(rng), m_dist(rng))
                       : gen_ces(n_dist(rng), 3, 0.5, {1.0, 1.0, 2.0},
                                 {0.5, 2.0}, {1.0, 10.0}, rng());
    const AfriatSolveResult r = afriat_solve(data);
    CHECK(r.feasible == check_garp(data).rationalizable);
    if (r.feasible) {
      ++feasible;
      CHECK(r.solution->max_violation(data) <= 1e-8);
    } else {
      ++infeasible;
    }
  }
  CHECK(feasible > 5);
  CHECK(infeasible > 5);
}

TEST_CASE("afriat utility evaluates the min-of-affine form") {
  const AfriatSolution sol{{1.0, 0.75}, {0.5, 0.375}};
  const AfriatUtility u(cobb_pair(), sol);
  CHECK(u.value(Bundle({1.0, 1.0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(u.value(Bundle({0.5, 1.0})) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(verify_rationalization(u, 400, 1e-9, 17).passed);
  CHECK(check_superdifferential(u, 400, 1e-9, 17));

  SUBCASE("concavity on random mixtures") {
    std::mt19937_64 rng(3030);
    std::uniform_real_distribution<double> coord(0.1, 10.0), lam(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
      const Bundle a({coord(rng), coord(rng)}), b({coord(rng), coord(rng)});
      const double l = lam(rng);
      const Bundle mix({l * a[0] + (1.0 - l) * b[0], l * a[1] + (1.0 - l) * b[1]});
      CHECK(u.value(mix) >= l * u.value(a) + (1.0 - l) * u.value(b) - 1e-12);
    }
  }
}

TEST_CASE("homogeneous utility works under an injected kernel") {
  const Kernel weighted{
      "weighted_inner", [](std::span<const double> x, std::span<const double> y) {
        const double w[2] = {3.0, 0.25};
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * x[k] * y[k];
        return s;
      }};
  const Dataset data =
      gen_cobb_douglas(4, 2, {0.5, 0.5}, {0.5, 2.0}, {1.0, 10.0}, 33);
  REQUIRE(check_harp(data, weighted).rationalizable);
  const HomogeneousUtility model =
      HomogeneousUtility::build(data, weighted);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(model.value(data[i].bundle) ==
          doctest::Approx(std::exp(model.potentials()[i])).epsilon(1e-12));
  }
  CHECK(model.value(data[0].bundle.scaled(3.0)) ==
        doctest::Approx(3.0 * model.value(data[0].bundle)).epsilon(1e-12));
  CHECK(verify_rationalization(model, 300, 1e-9, 8).passed);
  CHECK_THROWS_AS(afriat_from_homogeneous(model), InputError);
}
