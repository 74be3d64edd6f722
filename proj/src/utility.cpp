#include "revpref/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "revpref/simplex.hpp"

namespace revpref {

namespace detail {

std::vector<double> sample_log_uniform(std::uint64_t seed, std::uint64_t stream,
                                       std::size_t count, std::size_t m,
                                       double lo, double hi) {
  std::mt19937_64 rng(substream_seed(seed, stream));
  std::uniform_real_distribution<double> exponent(std::log(lo), std::log(hi));
  std::vector<double> out(count * m);
  for (double& v : out) v = std::exp(exponent(rng));
  return out;
}

}  // namespace detail

std::vector<double> shortest_path_potentials(const CrossLogMatrix& a,
                                             double tolerance) {
  const Closure c = floyd_warshall(a);
  if (c.negative_diagonal(tolerance)) {
    throw HarpViolationError(check_harp(a, tolerance));
  }
  std::vector<double> v(a.n);
  const double shift = c.at(0, 0);  // 0 up to the tolerance band
  for (std::size_t i = 0; i < a.n; ++i) v[i] = c.at(0, i) - shift;
  return v;
}

HomogeneousUtility::HomogeneousUtility(Dataset data, Kernel kernel,
                                       std::vector<double> potentials)
    : data_(std::move(data)),
      kernel_(std::move(kernel)),
      potentials_(std::move(potentials)) {
  if (potentials_.size() != data_.size()) {
    throw InputError("homogeneous utility: potential count != n");
  }
  normalizers_.resize(data_.size());
  weights_.resize(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) {
    normalizers_[i] = log_cost(data_[i].bundle, data_[i].prices, kernel_);
    weights_[i] = std::exp(potentials_[i] - normalizers_[i]);
  }
}

HomogeneousUtility HomogeneousUtility::build(const Dataset& data,
                                             const Kernel& kernel,
                                             double tolerance) {
  const CrossLogMatrix a = CrossLogMatrix::build(data, kernel);
  std::vector<double> v = shortest_path_potentials(a, tolerance);
  return HomogeneousUtility(data, kernel, std::move(v));
}

double HomogeneousUtility::value(const Bundle& z) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data_.size(); ++i) {
    best = std::min(best, weights_[i] * kernel_(z, data_[i].prices));
  }
  return best;
}

double HomogeneousUtility::log_value(const Bundle& z) const {
  return std::log(value(z));
}

int HomogeneousUtility::argmin_piece(const Bundle& z, double* margin) const {
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double v = weights_[i] * kernel_(z, data_[i].prices);
    if (v < best_v) {
      second = best_v;
      best_v = v;
      best = static_cast<int>(i);
    } else if (v < second) {
      second = v;
    }
  }
  if (margin) {
    *margin = std::isinf(second) ? second : (second - best_v) / best_v;
  }
  return best;
}

double AfriatSolution::max_violation(const Dataset& data) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (i == j) continue;
      double cross = 0.0;
      for (std::size_t k = 0; k < data.dimension(); ++k) {
        cross += data[i].prices[k] * (data[j].bundle[k] - data[i].bundle[k]);
      }
      worst = std::max(worst,
                       levels[j] - levels[i] - multipliers[i] * cross);
    }
  }
  return worst;
}

AfriatUtility::AfriatUtility(Dataset data, AfriatSolution solution)
    : data_(std::move(data)), solution_(std::move(solution)) {
  if (solution_.levels.size() != data_.size() ||
      solution_.multipliers.size() != data_.size()) {
    throw InputError("afriat utility: solution size != n");
  }
  own_spend_.resize(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) {
    own_spend_[i] = inner(data_[i].bundle, data_[i].prices);
  }
}

double AfriatUtility::value(const Bundle& z) const {
  if (z.dimension() != data_.dimension()) {
    throw InputError("afriat utility: bundle dimension mismatch");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double piece = solution_.levels[i] +
                         solution_.multipliers[i] *
                             (inner(z, data_[i].prices) - own_spend_[i]);
    best = std::min(best, piece);
  }
  return best;
}

AfriatSolveResult afriat_solve(const Dataset& data, double tolerance) {
  const std::size_t n = data.size();
  // Variables: y_i split into y+ - y- (2n), then sigma_i = s_i - 1 (n).
  LinearProgram lp;
  lp.num_vars = 3 * n;
  lp.objective.assign(lp.num_vars, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double e_ij = 0.0;
      for (std::size_t k = 0; k < data.dimension(); ++k) {
        e_ij += data[i].prices[k] * (data[j].bundle[k] - data[i].bundle[k]);
      }
      std::vector<double> row(lp.num_vars, 0.0);
      row[j] += 1.0;
      row[n + j] -= 1.0;
      row[i] -= 1.0;
      row[n + i] += 1.0;
      row[2 * n + i] = -e_ij;
      lp.add_constraint(std::move(row), e_ij);
    }
  }
  const LpResult sol = solve_lp(lp, tolerance);

  AfriatSolveResult result;
  result.phase1_objective = sol.phase1_objective;
  if (sol.status == LpStatus::Infeasible) {
    result.feasible = false;
    return result;
  }
  if (sol.status != LpStatus::Optimal) {
    throw NumericalError("afriat_solve: simplex did not terminate cleanly");
  }
  AfriatSolution afriat;
  afriat.levels.resize(n);
  afriat.multipliers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    afriat.levels[i] = sol.x[i] - sol.x[n + i];
    afriat.multipliers[i] = 1.0 + sol.x[2 * n + i];
  }
  const double residual = afriat.max_violation(data);
  if (residual > 10.0 * tolerance) {
    throw NumericalError(
        "afriat_solve: simplex claims feasibility but the returned point "
        "violates the system by " +
        std::to_string(residual));
  }
  result.feasible = true;
  result.solution = std::move(afriat);
  return result;
}

AfriatSolution afriat_from_homogeneous(const HomogeneousUtility& model,
                                       bool normalize) {
  if (model.kernel().tag != Kernel::standard_inner().tag) {
    throw InputError(
        "afriat_from_homogeneous: the Afriat system is linear in <P, X>; "
        "only the standard inner-product kernel maps onto it");
  }
  const Dataset& data = model.data();
  const std::size_t n = data.size();
  AfriatSolution out;
  out.levels.resize(n);
  out.multipliers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.levels[i] = std::exp(model.potentials()[i]);
    out.multipliers[i] = out.levels[i] / inner(data[i].bundle, data[i].prices);
  }
  if (normalize) {
    const double lo =
        *std::min_element(out.multipliers.begin(), out.multipliers.end());
    if (lo < 1.0) {
      const double scale = 1.0 / lo;
      for (double& y : out.levels) y *= scale;
      for (double& s : out.multipliers) s *= scale;
    }
  }
  return out;
}

namespace {

// Per-observation worst relative excess of u(Z)/b(Z,P^i) over
// u(X^i)/b(X^i,P^i), across all data bundles and the sampled ones.
double observation_violation(const HomogeneousUtility& model, std::size_t i,
                             std::size_t samples, std::uint64_t seed) {
  const Dataset& data = model.data();
  const Kernel& kernel = model.kernel();
  const PriceVector& p = data[i].prices;
  const double kappa =
      model.value(data[i].bundle) / kernel(data[i].bundle, p);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double ratio = model.value(data[j].bundle) / kernel(data[j].bundle, p);
    worst = std::max(worst, (ratio - kappa) / kappa);
  }
  const std::size_t m = data.dimension();
  const std::vector<double> coords =
      detail::sample_log_uniform(seed, i, samples, m);
  for (std::size_t s = 0; s < samples; ++s) {
    const Bundle z(std::vector<double>(coords.begin() + s * m,
                                       coords.begin() + (s + 1) * m));
    const double ratio = model.value(z) / kernel(z, p);
    worst = std::max(worst, (ratio - kappa) / kappa);
  }
  return worst;
}

VerificationReport gather_report(const std::vector<double>& violations,
                                 std::size_t samples, double tolerance,
                                 std::uint64_t seed) {
  VerificationReport report;
  report.samples_per_observation = samples;
  report.tolerance = tolerance;
  report.seed = seed;
  report.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (violations[i] > report.max_violation) {
      report.max_violation = violations[i];
      report.worst_observation = static_cast<int>(i);
    }
  }
  report.passed = report.max_violation <= tolerance;
  return report;
}

}  // namespace

VerificationReport verify_rationalization_serial(
    const HomogeneousUtility& model, std::size_t samples, double tolerance,
    std::uint64_t seed) {
  std::vector<double> violations(model.data().size());
  for (std::size_t i = 0; i < violations.size(); ++i) {
    violations[i] = observation_violation(model, i, samples, seed);
  }
  return gather_report(violations, samples, tolerance, seed);
}

VerificationReport verify_rationalization_parallel(
    const HomogeneousUtility& model, std::size_t samples, double tolerance,
    std::uint64_t seed) {
  std::vector<double> violations(model.data().size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(violations.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    violations[i] =
        observation_violation(model, static_cast<std::size_t>(i), samples, seed);
  }
  return gather_report(violations, samples, tolerance, seed);
}

VerificationReport verify_rationalization(const HomogeneousUtility& model,
                                          std::size_t samples, double tolerance,
                                          std::uint64_t seed) {
  return verify_rationalization_parallel(model, samples, tolerance, seed);
}

VerificationReport verify_rationalization(const AfriatUtility& model,
                                          std::size_t samples, double tolerance,
                                          std::uint64_t seed) {
  const Dataset& data = model.data();
  const std::size_t m = data.dimension();
  std::vector<double> violations(data.size(),
                                 -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double budget = inner(data[i].bundle, data[i].prices);
    const double u_own = model.value(data[i].bundle);
    const double scale = std::max(1.0, std::fabs(u_own));
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double b_j = inner(data[j].bundle, data[i].prices);
      if (b_j <= budget) {
        violations[i] = std::max(
            violations[i], (model.value(data[j].bundle) - u_own) / scale);
      }
    }
    const std::vector<double> coords =
        detail::sample_log_uniform(seed, i, samples, m);
    for (std::size_t s = 0; s < samples; ++s) {
      std::vector<double> q(coords.begin() + s * m,
                            coords.begin() + (s + 1) * m);
      const Bundle raw(q);
      // Rescale onto the budget hyperplane; affordability then holds exactly.
      const Bundle z = raw.scaled(budget / inner(raw, data[i].prices));
      violations[i] =
          std::max(violations[i], (model.value(z) - u_own) / scale);
    }
  }
  return gather_report(violations, samples, tolerance, seed);
}

bool check_superdifferential(const HomogeneousUtility& model,
                             std::size_t samples, double tolerance,
                             std::uint64_t seed) {
  const Dataset& data = model.data();
  const Kernel& kernel = model.kernel();
  const std::size_t m = data.dimension();
  // phi(z) <= phi(X^i) + c(z, P^i) - c(X^i, P^i) with phi = log u, c = ln b.
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double bound_base = model.log_value(data[i].bundle) -
                              log_cost(data[i].bundle, data[i].prices, kernel);
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double lhs = model.log_value(data[j].bundle);
      const double rhs =
          bound_base + log_cost(data[j].bundle, data[i].prices, kernel);
      if (lhs - rhs > tolerance) return false;
    }
    const std::vector<double> coords =
        detail::sample_log_uniform(seed, i, samples, m);
    for (std::size_t s = 0; s < samples; ++s) {
      const Bundle z(std::vector<double>(coords.begin() + s * m,
                                         coords.begin() + (s + 1) * m));
      if (model.log_value(z) - bound_base - log_cost(z, data[i].prices, kernel) >
          tolerance) {
        return false;
      }
    }
  }
  return true;
}

bool check_superdifferential(const AfriatUtility& model, std::size_t samples,
                             double tolerance, std::uint64_t seed) {
  const Dataset& data = model.data();
  const std::size_t m = data.dimension();
  const AfriatSolution& sol = model.solution();
  // Cost c(z, P^i) = s_i <P^i, z>; the potential is u itself.
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double bound_base =
        model.value(data[i].bundle) -
        sol.multipliers[i] * inner(data[i].bundle, data[i].prices);
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double slack = bound_base +
                           sol.multipliers[i] *
                               inner(data[j].bundle, data[i].prices) -
                           model.value(data[j].bundle);
      if (slack < -tolerance) return false;
    }
    const std::vector<double> coords =
        detail::sample_log_uniform(seed, i, samples, m);
    for (std::size_t s = 0; s < samples; ++s) {
      const Bundle z(std::vector<double>(coords.begin() + s * m,
                                         coords.begin() + (s + 1) * m));
      const double slack = bound_base +
                           sol.multipliers[i] * inner(z, data[i].prices) -
                           model.value(z);
      if (slack < -tolerance) return false;
    }
  }
  return true;
}

}  // namespace revpref
