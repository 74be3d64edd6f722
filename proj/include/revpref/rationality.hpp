// Revealed-preference graph and the rationalizability axioms: HARP via
// Floyd-Warshall negative-cycle detection, GARP via transitive closure,
// plus exhaustive oracles for small n.
#pragma once

#include <optional>
#include <vector>

#include "revpref/core.hpp"

namespace revpref {

/// Edge weights of the revealed-preference graph,
/// a_ij = ln b(X^j, P^i) - ln b(X^i, P^i). Diagonal exactly zero. A cycle
/// with negative total weight is exactly a HARP violation.
struct CrossLogMatrix {
  std::size_t n = 0;
  std::vector<double> a;  // row-major n*n

  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }

  static CrossLogMatrix build(const Dataset& data,
                              const Kernel& kernel = Kernel::standard_inner());
  static CrossLogMatrix build_serial(const Dataset& data, const Kernel& kernel);
  static CrossLogMatrix build_parallel(const Dataset& data,
                                       const Kernel& kernel);

  /// Total weight around cycle[0] -> cycle[1] -> ... -> cycle[0].
  double cycle_sum(const std::vector<int>& cycle) const;
};

/// Outcome of a rationalizability check. A Violated verdict carries a
/// witness cycle of observation indices whose recomputed weight is negative.
struct Verdict {
  bool rationalizable = true;
  std::vector<int> cycle;  // i1 -> i2 -> ... -> ik -> i1; empty when ok
  double cycle_sum = 0.0;

  static Verdict ok() { return {}; }
  static Verdict violated(std::vector<int> c, double sum) {
    return {false, std::move(c), sum};
  }
};

/// Thrown by constructions whose precondition is a passing axiom check.
class HarpViolationError : public std::runtime_error {
 public:
  explicit HarpViolationError(Verdict v)
      : std::runtime_error("dataset violates HARP: witness cycle of weight " +
                           std::to_string(v.cycle_sum)),
        verdict(std::move(v)) {}
  Verdict verdict;
};

/// All-pairs shortest walks of the complete digraph with weights a_ij,
/// textbook Warshall-Floyd recurrence. With negative cycles present some
/// diagonal entry goes below zero.
struct Closure {
  std::size_t n = 0;
  std::vector<double> dist;  // row-major
  std::vector<int> next;     // successor matrix for route reconstruction

  double at(std::size_t i, std::size_t j) const { return dist[i * n + j]; }
  /// Smallest i with dist(i,i) < -tolerance, if any.
  std::optional<int> negative_diagonal(double tolerance) const;
};

Closure floyd_warshall(const CrossLogMatrix& a);
Closure floyd_warshall_serial(const CrossLogMatrix& a);
Closure floyd_warshall_parallel(const CrossLogMatrix& a);

/// HARP: no cycle of the cross-log matrix sums below -tolerance. Decided by
/// Floyd-Warshall closure; a violation carries a reconstructed witness.
Verdict check_harp(const Dataset& data,
                   const Kernel& kernel = Kernel::standard_inner(),
                   double tolerance = kDefaultTolerance);
Verdict check_harp(const CrossLogMatrix& a,
                   double tolerance = kDefaultTolerance);

/// Oracle: enumerate every simple directed cycle of length 2..n and return
/// the most negative one. Refuses above the size cap.
Verdict brute_force_cycle_check(const Dataset& data,
                                const Kernel& kernel = Kernel::standard_inner(),
                                double tolerance = kDefaultTolerance,
                                std::size_t cap = 8);
Verdict brute_force_cycle_check(const CrossLogMatrix& a,
                                double tolerance = kDefaultTolerance,
                                std::size_t cap = 8);

/// General-cost c-cyclical monotonicity over an explicit set of pairs:
/// sum c(x_i, y_i) <= sum c(x_i, y_sigma(i)) + tolerance for every
/// permutation sigma, enumerated exhaustively. Refuses above the cap.
using CostFunction = std::function<double(const Bundle&, const PriceVector&)>;

Verdict check_cyclical_monotonicity(
    const std::vector<std::pair<Bundle, PriceVector>>& points,
    const CostFunction& cost, double tolerance = kDefaultTolerance,
    std::size_t cap = 8);

/// Standard GARP: direct revealed preference i R0 j iff
/// <P^i,X^i> >= <P^i,X^j> - tolerance, transitive closure by Warshall,
/// violated iff some i R j has <P^j,X^j> > <P^j,X^i> + tolerance. The
/// witness cycle is the revealed-preference chain closed by the strict
/// edge; its reported sum is the expenditure slack along the cycle.
Verdict check_garp(const Dataset& data, double tolerance = kDefaultTolerance);

}  // namespace revpref
