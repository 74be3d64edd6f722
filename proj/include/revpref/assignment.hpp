// Linear assignment on a square cost matrix: exhaustive oracle and an
// O(n^3) shortest-augmenting-path solver with dual potentials.
#pragma once

#include <vector>

#include "revpref/core.hpp"

namespace revpref {

struct Assignment {
  std::vector<int> row_to_col;
  double value = 0.0;
  std::vector<double> row_potentials;  // empty for the brute-force oracle
  std::vector<double> col_potentials;
};

/// Oracle: globally minimal permutation by enumeration of S_n; ties go to
/// the lexicographically smallest permutation. Refuses for n > cap.
Assignment brute_force_assignment(const Matrix& cost, std::size_t cap = 10);

/// Kuhn-Munkres / Jonker-Volgenant style solver. The returned potentials
/// satisfy phi_i + psi_j <= C_ij with equality on assigned pairs.
Assignment solve_assignment(const Matrix& cost);

}  // namespace revpref
