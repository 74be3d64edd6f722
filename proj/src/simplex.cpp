#include "revpref/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace revpref {

namespace {

constexpr double kPivotEps = 1e-9;

// Tableau layout: columns [structural | slack | artificial | rhs], one
// objective row kept reduced against the current basis. Constraint rows are
// equilibrated to max-abs 1 up front so the fixed tolerances match the
// problem scale.
struct Tableau {
  std::size_t m = 0;       // rows
  std::size_t n_total = 0; // columns excluding rhs
  std::vector<std::vector<double>> t;  // m rows, each n_total + 1
  std::vector<double> obj;             // n_total + 1 (rhs = -objective value)
  std::vector<int> basis;              // basis[r] = column basic in row r

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / t[r][c];
    for (double& v : t[r]) v *= inv;
    t[r][c] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = t[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_total; ++j) t[i][j] -= f * t[r][j];
      t[i][c] = 0.0;
    }
    const double f = obj[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= n_total; ++j) obj[j] -= f * t[r][j];
      obj[c] = 0.0;
    }
    basis[r] = static_cast<int>(c);
  }

  // Entering: lowest-index improving column. Leaving: minimum ratio; among
  // near-ties take the largest pivot element (numerical stability), then the
  // smallest basic index. The caller's iteration cap backstops cycling.
  LpStatus iterate(std::size_t allowed_cols, std::size_t& iterations,
                   std::size_t max_iterations) {
    for (;;) {
      std::size_t enter = n_total;
      for (std::size_t j = 0; j < allowed_cols; ++j) {
        if (obj[j] < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter == n_total) return LpStatus::Optimal;

      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m; ++r) {
        if (t[r][enter] > kPivotEps) {
          best_ratio = std::min(best_ratio, t[r][n_total] / t[r][enter]);
        }
      }
      if (best_ratio == std::numeric_limits<double>::infinity()) {
        return LpStatus::Unbounded;
      }
      const double band =
          best_ratio + 1e-9 * std::max(1.0, std::fabs(best_ratio));
      std::size_t leave = m;
      double big_pivot = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        if (t[r][enter] > kPivotEps && t[r][n_total] / t[r][enter] <= band) {
          if (t[r][enter] > big_pivot ||
              (t[r][enter] == big_pivot &&
               (leave == m || basis[r] < basis[leave]))) {
            big_pivot = t[r][enter];
            leave = r;
          }
        }
      }
      pivot(leave, enter);
      if (++iterations > max_iterations) {
        throw NumericalError("simplex: iteration cap exceeded");
      }
    }
  }
};

}  // namespace

void LinearProgram::add_constraint(std::vector<double> row, double bound) {
  if (row.size() != num_vars) {
    throw InputError("linear program: constraint width mismatch");
  }
  rows.push_back(std::move(row));
  rhs.push_back(bound);
}

LpResult solve_lp(const LinearProgram& lp, double tolerance,
                  std::size_t max_iterations) {
  const std::size_t m = lp.rows.size();
  const std::size_t n = lp.num_vars;
  if (lp.objective.size() != n) {
    throw InputError("linear program: objective width mismatch");
  }

  LpResult result;
  if (m == 0) {
    for (double c : lp.objective) {
      if (c < 0.0) {
        result.status = LpStatus::Unbounded;
        return result;
      }
    }
    result.status = LpStatus::Optimal;
    result.x.assign(n, 0.0);
    return result;
  }

  // Equilibrate rows, then flip negative-rhs rows and give them artificials.
  std::vector<double> row_scale(m, 1.0);
  std::vector<std::size_t> artificial_rows;
  for (std::size_t r = 0; r < m; ++r) {
    double mag = std::fabs(lp.rhs[r]);
    for (double v : lp.rows[r]) mag = std::max(mag, std::fabs(v));
    row_scale[r] = mag > 0.0 ? 1.0 / mag : 1.0;
    if (lp.rhs[r] < 0.0) artificial_rows.push_back(r);
  }
  const std::size_t n_art = artificial_rows.size();
  const std::size_t n_structural_slack = n + m;

  Tableau tab;
  tab.m = m;
  tab.n_total = n + m + n_art;
  tab.t.assign(m, std::vector<double>(tab.n_total + 1, 0.0));
  tab.basis.assign(m, -1);

  std::size_t art = 0;
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = lp.rhs[r] < 0.0 ? -1.0 : 1.0;
    const double f = sign * row_scale[r];
    for (std::size_t j = 0; j < n; ++j) tab.t[r][j] = f * lp.rows[r][j];
    tab.t[r][n + r] = f;  // slack
    tab.t[r][tab.n_total] = f * lp.rhs[r];
    if (sign < 0.0) {
      tab.t[r][n_structural_slack + art] = 1.0;
      tab.basis[r] = static_cast<int>(n_structural_slack + art);
      ++art;
    } else {
      tab.basis[r] = static_cast<int>(n + r);
    }
  }

  // Phase 1: minimize the sum of artificials.
  tab.obj.assign(tab.n_total + 1, 0.0);
  for (std::size_t a = 0; a < n_art; ++a) tab.obj[n_structural_slack + a] = 1.0;
  for (std::size_t r = 0; r < m; ++r) {
    const int b = tab.basis[r];
    if (b >= static_cast<int>(n_structural_slack)) {
      for (std::size_t j = 0; j <= tab.n_total; ++j) {
        tab.obj[j] -= tab.t[r][j];
      }
      tab.obj[b] = 0.0;
    }
  }

  LpStatus st = tab.iterate(tab.n_total, result.iterations, max_iterations);
  result.phase1_objective = -tab.obj[tab.n_total];
  if (st == LpStatus::Unbounded) {
    throw NumericalError("simplex: phase 1 reported unbounded");
  }
  if (result.phase1_objective > tolerance) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  // Drive leftover artificials out of the basis; a row with no usable pivot
  // is redundant and dropped.
  for (std::size_t r = 0; r < tab.m;) {
    if (tab.basis[r] < static_cast<int>(n_structural_slack)) {
      ++r;
      continue;
    }
    std::size_t col = tab.n_total;
    for (std::size_t j = 0; j < n_structural_slack; ++j) {
      if (std::fabs(tab.t[r][j]) > kPivotEps) {
        col = j;
        break;
      }
    }
    if (col < tab.n_total) {
      tab.pivot(r, col);
      ++r;
    } else {
      tab.t[r] = tab.t[tab.m - 1];
      tab.basis[r] = tab.basis[tab.m - 1];
      tab.t.pop_back();
      tab.basis.pop_back();
      --tab.m;
    }
  }

  // Phase 2 over structural + slack columns only.
  bool zero_objective = true;
  for (double c : lp.objective) {
    if (c != 0.0) zero_objective = false;
  }
  if (!zero_objective) {
    tab.obj.assign(tab.n_total + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) tab.obj[j] = lp.objective[j];
    for (std::size_t r = 0; r < tab.m; ++r) {
      const int b = tab.basis[r];
      if (b >= 0 && tab.obj[b] != 0.0) {
        const double f = tab.obj[b];
        for (std::size_t j = 0; j <= tab.n_total; ++j) {
          tab.obj[j] -= f * tab.t[r][j];
        }
        tab.obj[b] = 0.0;
      }
    }
    st = tab.iterate(n_structural_slack, result.iterations, max_iterations);
    if (st == LpStatus::Unbounded) {
      result.status = LpStatus::Unbounded;
      return result;
    }
  }

  result.x.assign(n, 0.0);
  for (std::size_t r = 0; r < tab.m; ++r) {
    const int b = tab.basis[r];
    if (b >= 0 && b < static_cast<int>(n)) {
      result.x[b] = tab.t[r][tab.n_total];
    }
  }
  result.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    result.objective += lp.objective[j] * result.x[j];
  }
  result.status = LpStatus::Optimal;
  return result;
}

}  // namespace revpref
