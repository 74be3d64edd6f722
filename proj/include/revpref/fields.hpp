// Desk-scale continuous checks: discretized closed-path sums of the demand
// field, potentiality and inverse-demand relations, finite differences, and
// the synthetic dataset generators used across the suite.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "revpref/core.hpp"
#include "revpref/rationality.hpp"

namespace revpref {

/// A demand field x -> p(x), strictly positive on the positive orthant.
struct SmoothDemandField {
  std::string tag;
  std::function<PriceVector(const Bundle&)> price_at;

  /// Field supporting the Cobb-Douglas log-utility sum alpha_k ln x_k:
  /// p(x)_k = alpha_k / x_k, already normalized to <x, p(x)> = 1.
  static SmoothDemandField cobb_douglas(std::vector<double> alpha);

  /// Deliberately non-potential field p(x) = (x_2^2, x_1, x_3, ...): its
  /// normalized version has nonvanishing curl in the (1,2)-plane.
  static SmoothDemandField twisted();
};

/// Loop gamma : [0,1] -> positive orthant with gamma(0) = gamma(1).
/// Consumers sample x_i = at(i/N) for i < N and reuse x_0 as x_N, so the
/// endpoint closure is exact by construction.
class ClosedPath {
 public:
  using Curve = std::function<std::vector<double>(double)>;

  ClosedPath(Curve curve, std::string tag);

  Bundle at(double t) const;  // t taken mod 1
  const std::string& tag() const { return tag_; }

  static ClosedPath circle(std::vector<double> center, std::size_t axis_a,
                           std::size_t axis_b, double radius);
  static ClosedPath ellipse(std::vector<double> center, std::size_t axis_a,
                            std::size_t axis_b, double radius_a,
                            double radius_b, double phase = 0.0);
  static ClosedPath constant(std::vector<double> point);

 private:
  Curve curve_;
  std::string tag_;
};

/// sum_{i=0}^{N-1} [ c(x_{i+1}, p(x_i)) - c(x_i, p(x_i)) ] with x_N = x_0.
/// Nonnegative for rationalizable fields and O(1/N) for smooth loops.
double discrete_path_sum(const ClosedPath& path, const SmoothDemandField& field,
                         const CostFunction& cost, std::size_t n_steps);
double discrete_path_sum_serial(const ClosedPath& path,
                                const SmoothDemandField& field,
                                const CostFunction& cost, std::size_t n_steps);
double discrete_path_sum_parallel(const ClosedPath& path,
                                  const SmoothDemandField& field,
                                  const CostFunction& cost,
                                  std::size_t n_steps);

/// ln of the default kernel pairing; the cost used throughout this module.
CostFunction log_inner_cost();

struct PathDecay {
  std::string path_tag;
  std::vector<std::size_t> n_values;
  std::vector<double> sums;
  bool decays = false;
  bool small_at_finest = false;
};

struct PotentialityReport {
  std::vector<PathDecay> paths;
  double threshold = 0.0;
  bool passed = false;
};

/// For each path, the sum at each N. PASS iff |sum| decreases along the N
/// ladder (values already under the threshold may stall) and the finest
/// |sum| is at most the threshold.
PotentialityReport potentiality_check(const SmoothDemandField& field,
                                      const std::vector<ClosedPath>& paths,
                                      const CostFunction& cost,
                                      const std::vector<std::size_t>& n_values,
                                      double threshold = 5e-3);

/// Central differences (f(x + h e_k) - f(x - h e_k)) / 2h. Throws when a
/// probe leaves the positive orthant.
std::vector<double> numeric_gradient(
    const std::function<double(const Bundle&)>& f, const Bundle& x,
    double h = 1e-5);

struct InverseDemandReport {
  double max_residual = 0.0;
  std::size_t points = 0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Verifies p(x)/<x, p(x)> = grad v(x) in the sup norm at the given points.
InverseDemandReport check_inverse_demand(
    const std::function<std::vector<double>(const Bundle&)>& grad_v,
    const SmoothDemandField& field, const std::vector<Bundle>& points,
    double tolerance = 1e-8);

/// Log-uniform sampling box for generated prices and incomes.
struct SampleRange {
  double lo = 0.5;
  double hi = 2.0;
};

/// Utility-maximizing Cobb-Douglas demand, X_k = alpha_k w / p_k, with
/// prices and income sampled log-uniformly. Deterministic under seed.
Dataset gen_cobb_douglas(std::size_t n, std::size_t m,
                         const std::vector<double>& alpha,
                         SampleRange price_range, SampleRange income_range,
                         std::uint64_t seed);

/// CES demand x_k = (a_k/p_k)^sigma w / sum_j a_j^sigma p_j^(1-sigma) with
/// sigma = 1/(1-rho); rho < 1, rho != 0.
Dataset gen_ces(std::size_t n, std::size_t m, double rho,
                const std::vector<double>& weights, SampleRange price_range,
                SampleRange income_range, std::uint64_t seed);

/// Replaces one bundle with a tilt of another observation's bundle that is
/// strictly cheaper at the victim's own prices yet dearer at the chooser's,
/// geometrically blended by strength in [0, 1]. Strength 0 is the identity;
/// strength 1 forces a negative 2-cycle whenever some pair of price vectors
/// is not proportional.
Dataset inject_violation(const Dataset& data, double strength,
                         std::uint64_t seed);

}  // namespace revpref
