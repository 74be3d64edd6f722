// Self-contained dense two-phase simplex for small feasibility and
// minimization problems: min c'x subject to Ax <= b, x >= 0.
#pragma once

#include <cstddef>
#include <vector>

#include "revpref/core.hpp"

namespace revpref {

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;           // length num_vars; may be all zero
  std::vector<std::vector<double>> rows;   // each length num_vars
  std::vector<double> rhs;                 // one per row

  void add_constraint(std::vector<double> row, double bound);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  // Leftover artificial mass of the row-equilibrated system; a value above
  // the tolerance certifies infeasibility.
  double phase1_objective = 0.0;
  std::size_t iterations = 0;
};

/// Two-phase tableau simplex with Bland's rule (no cycling). The tolerance
/// separates feasible from infeasible phase-1 optima; pivot selection uses
/// a fixed 1e-11 threshold. Throws NumericalError on the iteration cap.
LpResult solve_lp(const LinearProgram& lp, double tolerance = kDefaultTolerance,
                  std::size_t max_iterations = 200000);

}  // namespace revpref
