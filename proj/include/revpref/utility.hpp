// Construction and verification of rationalizing utilities: the homogeneous
// min-of-linear form from shortest-path potentials, and the piecewise-linear
// concave form from the Afriat inequality system.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "revpref/core.hpp"
#include "revpref/rationality.hpp"

namespace revpref {

/// Shortest-path distances from node 0 in the complete digraph with weights
/// a_jk, shifted so v_0 = 0. Satisfies v_j - v_i <= a_ij for all i, j.
/// Throws HarpViolationError (with witness) when a negative cycle exists.
std::vector<double> shortest_path_potentials(
    const CrossLogMatrix& a, double tolerance = kDefaultTolerance);

/// Positive homogeneous utility u(z) = min_i exp(v_i - d_i) b(z, P^i),
/// where d_i = ln b(X^i, P^i). At the data points u(X^i) = exp(v_i).
class HomogeneousUtility {
 public:
  HomogeneousUtility(Dataset data, Kernel kernel, std::vector<double> potentials);

  static HomogeneousUtility build(const Dataset& data,
                                  const Kernel& kernel = Kernel::standard_inner(),
                                  double tolerance = kDefaultTolerance);

  double value(const Bundle& z) const;
  double log_value(const Bundle& z) const;

  /// Index attaining the min at z; margin receives the relative gap to the
  /// second-best piece (0 on ties, infinity when n = 1).
  int argmin_piece(const Bundle& z, double* margin = nullptr) const;

  const Dataset& data() const { return data_; }
  const Kernel& kernel() const { return kernel_; }
  const std::vector<double>& potentials() const { return potentials_; }
  const std::vector<double>& normalizers() const { return normalizers_; }

 private:
  Dataset data_;
  Kernel kernel_;
  std::vector<double> potentials_;   // v_i
  std::vector<double> normalizers_;  // d_i = ln b(X^i, P^i)
  std::vector<double> weights_;      // exp(v_i - d_i)
};

/// A feasible point of the Afriat system
/// y_j - y_i <= s_i <P^i, X^j - X^i>, with multipliers normalized to s_i >= 1.
struct AfriatSolution {
  std::vector<double> levels;       // y_i
  std::vector<double> multipliers;  // s_i

  /// Largest violation y_j - y_i - s_i <P^i, X^j - X^i> over all pairs.
  double max_violation(const Dataset& data) const;
};

/// Concave piecewise-linear utility u(x) = min_i { y_i + s_i <P^i, x - X^i> }.
class AfriatUtility {
 public:
  AfriatUtility(Dataset data, AfriatSolution solution);

  double value(const Bundle& z) const;

  const Dataset& data() const { return data_; }
  const AfriatSolution& solution() const { return solution_; }

 private:
  Dataset data_;
  AfriatSolution solution_;
  std::vector<double> own_spend_;  // <P^i, X^i>
};

struct AfriatSolveResult {
  bool feasible = false;
  std::optional<AfriatSolution> solution;
  double phase1_objective = 0.0;  // infeasibility certificate when positive
};

/// Decides feasibility of the Afriat system by two-phase simplex over
/// (y, s) with s_i >= 1 and returns the first feasible basic point.
AfriatSolveResult afriat_solve(const Dataset& data,
                               double tolerance = kDefaultTolerance);

/// Bridge from the homogeneous model: y_i = exp(v_i),
/// s_i = exp(v_i) / <P^i, X^i>; the potential inequalities exponentiate to
/// exactly the Afriat system. Requires the standard inner-product kernel.
AfriatSolution afriat_from_homogeneous(const HomogeneousUtility& model,
                                       bool normalize = true);

struct VerificationReport {
  bool passed = true;
  double max_violation = 0.0;  // relative excess of u(Z)/b(Z,P^i) over u(X^i)/b(X^i,P^i)
  int worst_observation = -1;
  std::size_t samples_per_observation = 0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
};

/// Checks u(X^i)/b(X^i,P^i) >= u(Z)/b(Z,P^i) at every data point exactly and
/// at sampled log-uniform Z in [1e-2, 1e2]^m, per observation.
VerificationReport verify_rationalization(const HomogeneousUtility& model,
                                          std::size_t samples = 1000,
                                          double tolerance = kDefaultTolerance,
                                          std::uint64_t seed = 0);
VerificationReport verify_rationalization_serial(const HomogeneousUtility& model,
                                                 std::size_t samples,
                                                 double tolerance,
                                                 std::uint64_t seed);
VerificationReport verify_rationalization_parallel(
    const HomogeneousUtility& model, std::size_t samples, double tolerance,
    std::uint64_t seed);

/// Budget rationalization check for the Afriat form: u(Z) <= u(X^i) for
/// sampled Z rescaled onto each budget hyperplane <P^i, Z> = <P^i, X^i>.
VerificationReport verify_rationalization(const AfriatUtility& model,
                                          std::size_t samples = 1000,
                                          double tolerance = kDefaultTolerance,
                                          std::uint64_t seed = 0);

/// Containment of the data in the c-superdifferential of the potential:
/// phi(z) <= phi(X^i) + c(z, i) - c(X^i, i) at data points and samples.
bool check_superdifferential(const HomogeneousUtility& model,
                             std::size_t samples = 1000,
                             double tolerance = kDefaultTolerance,
                             std::uint64_t seed = 0);
bool check_superdifferential(const AfriatUtility& model,
                             std::size_t samples = 1000,
                             double tolerance = kDefaultTolerance,
                             std::uint64_t seed = 0);

namespace detail {
/// Log-uniform sample in [1e-2, 1e2]^m, shared by the verification ops.
std::vector<double> sample_log_uniform(std::uint64_t seed, std::uint64_t stream,
                                       std::size_t count, std::size_t m,
                                       double lo = 1e-2, double hi = 1e2);
}  // namespace detail

}  // namespace revpref
