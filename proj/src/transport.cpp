#include "revpref/transport.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

namespace revpref {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kReducedCostEps = 1e-11;

void check_weights(const std::vector<double>& w, const char* what) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InputError(std::string(what) + ": weights must be nonnegative");
    }
    sum += x;
  }
  if (std::fabs(sum - 1.0) > kWeightTolerance) {
    throw InputError(std::string(what) + ": weights sum to " +
                     std::to_string(sum) + ", expected 1");
  }
}

// Dense transportation simplex on a balanced problem. Bland's rule on the
// row-major cell order prevents cycling through degenerate bases.
struct TransportSimplex {
  const Matrix& cost;
  std::vector<double> mu, nu;
  std::size_t k, l;
  Matrix flow;
  std::vector<char> is_basic;
  std::vector<double> u, v;

  TransportSimplex(const Matrix& c, std::vector<double> mu_in,
                   std::vector<double> nu_in)
      : cost(c),
        mu(std::move(mu_in)),
        nu(std::move(nu_in)),
        k(mu.size()),
        l(nu.size()),
        flow(k, l),
        is_basic(k * l, 0),
        u(k, 0.0),
        v(l, 0.0) {}

  void northwest_corner() {
    std::vector<double> mr = mu, nr = nu;
    std::size_t i = 0, j = 0;
    for (;;) {
      const double theta = std::min(mr[i], nr[j]);
      flow.at(i, j) = theta;
      is_basic[i * l + j] = 1;
      mr[i] -= theta;
      nr[j] -= theta;
      if (i + 1 == k && j + 1 == l) break;
      if (i + 1 < k && (mr[i] == 0.0 || j + 1 == l)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Potentials from the spanning-tree equations u_i + v_j = C_ij on basic
  // cells, rooted at row 0.
  void compute_potentials() {
    std::vector<char> known_row(k, 0), known_col(l, 0);
    std::deque<std::pair<char, std::size_t>> queue;  // ('r', i) or ('c', j)
    known_row[0] = 1;
    u[0] = 0.0;
    queue.emplace_back('r', 0);
    while (!queue.empty()) {
      auto [kind, idx] = queue.front();
      queue.pop_front();
      if (kind == 'r') {
        for (std::size_t j = 0; j < l; ++j) {
          if (is_basic[idx * l + j] && !known_col[j]) {
            v[j] = cost.at(idx, j) - u[idx];
            known_col[j] = 1;
            queue.emplace_back('c', j);
          }
        }
      } else {
        for (std::size_t i = 0; i < k; ++i) {
          if (is_basic[i * l + idx] && !known_row[i]) {
            u[i] = cost.at(i, idx) - v[idx];
            known_row[i] = 1;
            queue.emplace_back('r', i);
          }
        }
      }
    }
    for (char c : known_row) {
      if (!c) throw NumericalError("transport simplex: basis lost connectivity");
    }
    for (char c : known_col) {
      if (!c) throw NumericalError("transport simplex: basis lost connectivity");
    }
  }

  // Alternating path of basic cells joining row ei to column ej; the unique
  // tree cycle of the entering cell.
  std::vector<std::pair<std::size_t, std::size_t>> find_cycle(std::size_t ei,
                                                              std::size_t ej) {
    const std::size_t nodes = k + l;
    std::vector<int> parent_node(nodes, -2);
    std::vector<std::pair<std::size_t, std::size_t>> parent_cell(nodes);
    std::deque<std::size_t> queue;
    parent_node[ei] = -1;
    queue.push_back(ei);
    const std::size_t target = k + ej;
    while (!queue.empty()) {
      const std::size_t node = queue.front();
      queue.pop_front();
      if (node == target) break;
      if (node < k) {
        for (std::size_t j = 0; j < l; ++j) {
          if (is_basic[node * l + j] && parent_node[k + j] == -2) {
            parent_node[k + j] = static_cast<int>(node);
            parent_cell[k + j] = {node, j};
            queue.push_back(k + j);
          }
        }
      } else {
        const std::size_t j = node - k;
        for (std::size_t i = 0; i < k; ++i) {
          if (is_basic[i * l + j] && parent_node[i] == -2) {
            parent_node[i] = static_cast<int>(node);
            parent_cell[i] = {i, j};
            queue.push_back(i);
          }
        }
      }
    }
    if (parent_node[target] == -2) {
      throw NumericalError("transport simplex: entering cell has no tree path");
    }
    // Cells from the target back to the start, i.e. cycle walk order after
    // the entering cell.
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t node = target; parent_node[node] != -1;
         node = static_cast<std::size_t>(parent_node[node])) {
      cells.push_back(parent_cell[node]);
    }
    return cells;
  }

  void run() {
    northwest_corner();
    const std::size_t max_pivots = 200 * k * l + 1000;
    for (std::size_t pivots = 0;; ++pivots) {
      if (pivots > max_pivots) {
        throw NumericalError("transport simplex: pivot cap exceeded");
      }
      compute_potentials();
      std::size_t ei = k, ej = l;
      for (std::size_t i = 0; i < k && ei == k; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
          if (is_basic[i * l + j]) continue;
          if (cost.at(i, j) - u[i] - v[j] < -kReducedCostEps) {
            ei = i;
            ej = j;
            break;
          }
        }
      }
      if (ei == k) return;  // optimal

      const auto path = find_cycle(ei, ej);
      // Walk order: entering cell, then path cells; signs alternate +,-,...
      double theta = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < path.size(); t += 2) {
        theta = std::min(theta, flow.at(path[t].first, path[t].second));
      }
      std::pair<std::size_t, std::size_t> leaving{k, l};
      for (std::size_t t = 0; t < path.size(); t += 2) {
        if (flow.at(path[t].first, path[t].second) == theta &&
            path[t] < leaving) {
          leaving = path[t];
        }
      }
      flow.at(ei, ej) += theta;
      for (std::size_t t = 0; t < path.size(); ++t) {
        double& f = flow.at(path[t].first, path[t].second);
        f += (t % 2 == 0) ? -theta : theta;
      }
      flow.at(leaving.first, leaving.second) = 0.0;
      is_basic[leaving.first * l + leaving.second] = 0;
      is_basic[ei * l + ej] = 1;
    }
  }
};

}  // namespace

TransportInstance::TransportInstance(std::vector<Bundle> sources_in,
                                     std::vector<double> mu_in,
                                     std::vector<PriceVector> targets_in,
                                     std::vector<double> nu_in, Kernel kernel_in)
    : sources(std::move(sources_in)),
      mu(std::move(mu_in)),
      targets(std::move(targets_in)),
      nu(std::move(nu_in)),
      kernel(std::move(kernel_in)) {
  if (sources.empty() || targets.empty()) {
    throw InputError("transport instance: needs at least one source and target");
  }
  if (mu.size() != sources.size() || nu.size() != targets.size()) {
    throw InputError("transport instance: weight count mismatch");
  }
  check_weights(mu, "transport instance sources");
  check_weights(nu, "transport instance targets");
  cost = Matrix(sources.size(), targets.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = 0; j < targets.size(); ++j) {
      cost.at(i, j) = log_cost(sources[i], targets[j], kernel);
    }
  }
}

TransportInstance TransportInstance::from_dataset(const Dataset& data,
                                                  const Kernel& kernel) {
  std::vector<Bundle> xs;
  std::vector<PriceVector> ys;
  for (const Observation& o : data) {
    xs.push_back(o.bundle);
    ys.push_back(o.prices);
  }
  const double w = 1.0 / static_cast<double>(data.size());
  return TransportInstance(std::move(xs), std::vector<double>(data.size(), w),
                           std::move(ys), std::vector<double>(data.size(), w),
                           kernel);
}

Coupling Coupling::from_plan(Matrix plan, const TransportInstance& inst) {
  if (plan.rows != inst.sources.size() || plan.cols != inst.targets.size()) {
    throw InputError("coupling: plan shape does not match the instance");
  }
  Coupling out;
  out.value = 0.0;
  for (std::size_t i = 0; i < plan.rows; ++i) {
    for (std::size_t j = 0; j < plan.cols; ++j) {
      const double p = plan.at(i, j);
      if (p < -1e-12) throw InputError("coupling: negative plan entry");
      if (p != 0.0) out.value += p * inst.cost.at(i, j);
    }
  }
  out.plan = std::move(plan);
  return out;
}

double Coupling::max_marginal_error(const TransportInstance& inst) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < plan.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < plan.cols; ++j) s += plan.at(i, j);
    worst = std::max(worst, std::fabs(s - inst.mu[i]));
  }
  for (std::size_t j = 0; j < plan.cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < plan.rows; ++i) s += plan.at(i, j);
    worst = std::max(worst, std::fabs(s - inst.nu[j]));
  }
  return worst;
}

double DualPotentials::max_infeasibility(const TransportInstance& inst) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t j = 0; j < psi.size(); ++j) {
      worst = std::max(worst, phi[i] + psi[j] - inst.cost.at(i, j));
    }
  }
  return worst;
}

double DualPotentials::max_slackness_gap(const Coupling& plan,
                                         const TransportInstance& inst,
                                         double support_threshold) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < plan.plan.rows; ++i) {
    for (std::size_t j = 0; j < plan.plan.cols; ++j) {
      if (plan.plan.at(i, j) > support_threshold) {
        worst = std::max(worst,
                         std::fabs(inst.cost.at(i, j) - phi[i] - psi[j]));
      }
    }
  }
  return worst;
}

double DualPotentials::dual_value(const TransportInstance& inst) const {
  double s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += phi[i] * inst.mu[i];
  for (std::size_t j = 0; j < psi.size(); ++j) s += psi[j] * inst.nu[j];
  return s;
}

Coupling diagonal_coupling(const TransportInstance& inst) {
  if (inst.sources.size() != inst.targets.size()) {
    throw InputError("diagonal coupling: needs equally many sources/targets");
  }
  Matrix plan(inst.sources.size(), inst.targets.size());
  for (std::size_t i = 0; i < inst.sources.size(); ++i) {
    if (std::fabs(inst.mu[i] - inst.nu[i]) > kWeightTolerance) {
      throw InputError("diagonal coupling: marginals differ at index " +
                       std::to_string(i));
    }
    plan.at(i, i) = inst.mu[i];
  }
  return Coupling::from_plan(std::move(plan), inst);
}

Coupling permutation_coupling(const TransportInstance& inst,
                              const std::vector<int>& sigma) {
  if (sigma.size() != inst.sources.size() ||
      inst.sources.size() != inst.targets.size()) {
    throw InputError("permutation coupling: size mismatch");
  }
  Matrix plan(inst.sources.size(), inst.targets.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(sigma[i]);
    if (std::fabs(inst.mu[i] - inst.nu[j]) > kWeightTolerance) {
      throw InputError("permutation coupling: marginals are not permutable");
    }
    plan.at(i, j) = inst.mu[i];
  }
  return Coupling::from_plan(std::move(plan), inst);
}

OtSolution solve_discrete_ot(const TransportInstance& inst) {
  const std::size_t k0 = inst.sources.size(), l0 = inst.targets.size();
  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < k0; ++i) {
    if (inst.mu[i] > 0.0) rows.push_back(i);
  }
  for (std::size_t j = 0; j < l0; ++j) {
    if (inst.nu[j] > 0.0) cols.push_back(j);
  }
  const std::size_t k = rows.size(), l = cols.size();
  Matrix c(k, l);
  std::vector<double> cmu(k), cnu(l);
  for (std::size_t i = 0; i < k; ++i) {
    cmu[i] = inst.mu[rows[i]];
    for (std::size_t j = 0; j < l; ++j) c.at(i, j) = inst.cost.at(rows[i], cols[j]);
  }
  for (std::size_t j = 0; j < l; ++j) cnu[j] = inst.nu[cols[j]];

  bool uniform = k == l;
  if (uniform) {
    const double w = 1.0 / static_cast<double>(k);
    for (double x : cmu) uniform = uniform && std::fabs(x - w) <= kWeightTolerance;
    for (double x : cnu) uniform = uniform && std::fabs(x - w) <= kWeightTolerance;
  }

  Matrix compact_plan(k, l);
  std::vector<double> cu(k), cv(l);
  if (uniform) {
    const Assignment a = solve_assignment(c);
    for (std::size_t i = 0; i < k; ++i) {
      compact_plan.at(i, static_cast<std::size_t>(a.row_to_col[i])) = cmu[i];
    }
    cu = a.row_potentials;
    cv = a.col_potentials;
  } else {
    TransportSimplex solver(c, cmu, cnu);
    solver.run();
    compact_plan = solver.flow;
    cu = solver.u;
    cv = solver.v;
  }

  OtSolution out;
  Matrix plan(k0, l0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      plan.at(rows[i], cols[j]) = compact_plan.at(i, j);
    }
  }
  out.coupling = Coupling::from_plan(std::move(plan), inst);

  // Dropped indices carry no mass; give them the tightest feasible
  // potentials so dual feasibility holds over the full index set.
  out.duals.phi.assign(k0, 0.0);
  out.duals.psi.assign(l0, 0.0);
  std::vector<char> has_phi(k0, 0), has_psi(l0, 0);
  for (std::size_t i = 0; i < k; ++i) {
    out.duals.phi[rows[i]] = cu[i];
    has_phi[rows[i]] = 1;
  }
  for (std::size_t j = 0; j < l; ++j) {
    out.duals.psi[cols[j]] = cv[j];
    has_psi[cols[j]] = 1;
  }
  for (std::size_t i = 0; i < k0; ++i) {
    if (has_phi[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < l; ++j) {
      best = std::min(best, inst.cost.at(i, cols[j]) - cv[j]);
    }
    out.duals.phi[i] = best;
  }
  for (std::size_t j = 0; j < l0; ++j) {
    if (has_psi[j]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k0; ++i) {
      best = std::min(best, inst.cost.at(i, j) - out.duals.phi[i]);
    }
    out.duals.psi[j] = best;
  }
  return out;
}

bool is_diagonal_optimal(const Dataset& data, const Kernel& kernel,
                         double tolerance) {
  const std::size_t n = data.size();
  Matrix c(n, n);
  double identity_value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c.at(i, j) = log_cost(data[i].bundle, data[j].prices, kernel);
    }
    identity_value += c.at(i, i);
  }
  const Assignment best = solve_assignment(c);
  return identity_value <= best.value + tolerance;
}

bool check_support_cyclical_monotonicity(const Coupling& plan,
                                         const TransportInstance& inst,
                                         double tolerance, std::size_t cap,
                                         double support_threshold) {
  std::vector<std::pair<Bundle, PriceVector>> support;
  for (std::size_t i = 0; i < plan.plan.rows; ++i) {
    for (std::size_t j = 0; j < plan.plan.cols; ++j) {
      if (plan.plan.at(i, j) > support_threshold) {
        support.emplace_back(inst.sources[i], inst.targets[j]);
      }
    }
  }
  const Kernel& kernel = inst.kernel;
  return check_cyclical_monotonicity(
             support,
             [&kernel](const Bundle& x, const PriceVector& y) {
               return log_cost(x, y, kernel);
             },
             tolerance, cap)
      .rationalizable;
}

Dataset project_to_sphere(const Dataset& data) {
  std::vector<Observation> out;
  out.reserve(data.size());
  for (const Observation& o : data) {
    out.push_back({o.index, o.bundle.scaled(1.0 / o.bundle.euclidean_norm()),
                   o.prices.scaled(1.0 / o.prices.euclidean_norm())});
  }
  return Dataset(std::move(out));
}

TransportInstance project_to_sphere(const TransportInstance& inst) {
  std::vector<Bundle> xs;
  std::vector<PriceVector> ys;
  for (const Bundle& x : inst.sources) {
    xs.push_back(x.scaled(1.0 / x.euclidean_norm()));
  }
  for (const PriceVector& y : inst.targets) {
    ys.push_back(y.scaled(1.0 / y.euclidean_norm()));
  }
  return TransportInstance(std::move(xs), inst.mu, std::move(ys), inst.nu,
                           inst.kernel);
}

double cost_decomposition_check(const Coupling& plan,
                                const TransportInstance& inst) {
  const std::size_t k = inst.sources.size(), l = inst.targets.size();
  std::vector<Bundle> xs;
  std::vector<PriceVector> ys;
  std::vector<double> log_x(k), log_y(l);
  xs.reserve(k);
  ys.reserve(l);
  for (std::size_t i = 0; i < k; ++i) {
    const double norm = inst.sources[i].euclidean_norm();
    log_x[i] = std::log(norm);
    xs.push_back(inst.sources[i].scaled(1.0 / norm));
  }
  for (std::size_t j = 0; j < l; ++j) {
    const double norm = inst.targets[j].euclidean_norm();
    log_y[j] = std::log(norm);
    ys.push_back(inst.targets[j].scaled(1.0 / norm));
  }
  double lhs = 0.0, transported = 0.0;
  std::vector<double> mu_hat(k, 0.0), nu_hat(l, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      const double p = plan.plan.at(i, j);
      if (p == 0.0) continue;
      lhs += p * log_cost(xs[i], ys[j], inst.kernel);
      transported += p * inst.cost.at(i, j);
      mu_hat[i] += p;
      nu_hat[j] += p;
    }
  }
  double rhs = transported;
  for (std::size_t i = 0; i < k; ++i) rhs -= mu_hat[i] * log_x[i];
  for (std::size_t j = 0; j < l; ++j) rhs -= nu_hat[j] * log_y[j];
  return std::fabs(lhs - rhs);
}

bool projection_preserves_optimum(const Dataset& data, const Kernel& kernel,
                                  double value_tolerance, std::size_t cap) {
  const std::size_t n = data.size();
  if (n > cap) {
    throw CapError("projection_preserves_optimum: n exceeds the cap");
  }
  Matrix c(n, n), cp(n, n);
  const Dataset projected = project_to_sphere(data);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c.at(i, j) = log_cost(data[i].bundle, data[j].prices, kernel);
      cp.at(i, j) = log_cost(projected[i].bundle, projected[j].prices, kernel);
    }
  }
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  double best_p = best;
  do {
    double val = 0.0, val_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      val += c.at(i, sigma[i]);
      val_p += cp.at(i, sigma[i]);
    }
    best = std::min(best, val);
    best_p = std::min(best_p, val_p);
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  std::set<std::vector<int>> argmin, argmin_p;
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    double val = 0.0, val_p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      val += c.at(i, sigma[i]);
      val_p += cp.at(i, sigma[i]);
    }
    if (val <= best + value_tolerance) argmin.insert(sigma);
    if (val_p <= best_p + value_tolerance) argmin_p.insert(sigma);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return argmin == argmin_p;
}

}  // namespace revpref
