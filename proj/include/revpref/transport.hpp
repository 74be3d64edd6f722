// Discrete Monge-Kantorovich problems with cost ln b(x, y): transportation
// simplex with dual potentials, diagonal-optimality checks, and the
// sphere-projection identities.
#pragma once

#include <vector>

#include "revpref/assignment.hpp"
#include "revpref/core.hpp"
#include "revpref/rationality.hpp"

namespace revpref {

/// Weighted sources (bundles) and targets (price vectors) plus the cost
/// table C_ij = ln b(x_i, y_j). Weights must each sum to 1 within 1e-12.
struct TransportInstance {
  std::vector<Bundle> sources;
  std::vector<double> mu;
  std::vector<PriceVector> targets;
  std::vector<double> nu;
  Kernel kernel;
  Matrix cost;

  TransportInstance(std::vector<Bundle> sources, std::vector<double> mu,
                    std::vector<PriceVector> targets, std::vector<double> nu,
                    Kernel kernel = Kernel::standard_inner());

  /// Uniform 1/n marginals on (X^i) and (P^i).
  static TransportInstance from_dataset(
      const Dataset& data, const Kernel& kernel = Kernel::standard_inner());
};

struct Coupling {
  Matrix plan;
  double value = 0.0;

  static Coupling from_plan(Matrix plan, const TransportInstance& inst);
  /// Largest deviation of a row sum from mu or a column sum from nu.
  double max_marginal_error(const TransportInstance& inst) const;
};

struct DualPotentials {
  std::vector<double> phi;  // sources
  std::vector<double> psi;  // targets

  /// max over (i,j) of phi_i + psi_j - C_ij; feasible when <= tolerance.
  double max_infeasibility(const TransportInstance& inst) const;
  /// max over supported cells of |C_ij - phi_i - psi_j| (slackness gap).
  double max_slackness_gap(const Coupling& plan, const TransportInstance& inst,
                           double support_threshold = 1e-12) const;
  double dual_value(const TransportInstance& inst) const;
};

struct OtSolution {
  Coupling coupling;
  DualPotentials duals;
};

/// The coupling concentrated on the diagonal (x_i, y_i); requires matching
/// marginals mu_i = nu_i.
Coupling diagonal_coupling(const TransportInstance& inst);

/// Coupling carried by a permutation: plan(i, sigma(i)) = mu_i.
Coupling permutation_coupling(const TransportInstance& inst,
                              const std::vector<int>& sigma);

/// Exact optimum. Uniform square marginals route to the assignment solver;
/// general weights go through the transportation simplex (Bland's rule).
/// Zero-weight sources/targets are dropped before solving.
OtSolution solve_discrete_ot(const TransportInstance& inst);

/// Theorem item "the diagonal coupling is optimal": identity assignment
/// value against the assignment optimum, uniform weights.
bool is_diagonal_optimal(const Dataset& data,
                         const Kernel& kernel = Kernel::standard_inner(),
                         double tolerance = kDefaultTolerance);

/// Extracts the support {(x_i, y_j) : plan_ij > threshold} and checks
/// c-cyclical monotonicity by permutation enumeration.
bool check_support_cyclical_monotonicity(const Coupling& plan,
                                         const TransportInstance& inst,
                                         double tolerance = kDefaultTolerance,
                                         std::size_t cap = 8,
                                         double support_threshold = 1e-12);

/// Every source and target divided by its Euclidean norm; weights kept.
Dataset project_to_sphere(const Dataset& data);
TransportInstance project_to_sphere(const TransportInstance& inst);

/// Residual of the identity
///   sum pi_ij ln b(x/|x|, y/|y|)
///     = sum pi_ij ln b(x,y) - sum mu_i ln|x_i| - sum nu_j ln|y_j|
/// with the marginals taken from the plan's own projections. Exact up to
/// rounding for every plan.
double cost_decomposition_check(const Coupling& plan,
                                const TransportInstance& inst);

/// True iff the set of optimal permutations (within value_tolerance of the
/// minimum, by enumeration) is identical for the original and the
/// sphere-projected cost matrices.
bool projection_preserves_optimum(const Dataset& data,
                                  const Kernel& kernel = Kernel::standard_inner(),
                                  double value_tolerance = 1e-10,
                                  std::size_t cap = 10);

}  // namespace revpref
