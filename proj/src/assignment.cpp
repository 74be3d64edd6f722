#include "revpref/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace revpref {

namespace {

void require_square(const Matrix& cost) {
  if (cost.rows != cost.cols || cost.rows == 0) {
    throw InputError("assignment: cost matrix must be square and nonempty");
  }
}

}  // namespace

Assignment brute_force_assignment(const Matrix& cost, std::size_t cap) {
  require_square(cost);
  const std::size_t n = cost.rows;
  if (n > cap) {
    throw CapError("brute_force_assignment: n = " + std::to_string(n) +
                   " exceeds the enumeration cap " + std::to_string(cap));
  }
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  Assignment best;
  best.value = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost.at(i, sigma[i]);
    if (total < best.value) {
      best.value = total;
      best.row_to_col = sigma;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return best;
}

Assignment solve_assignment(const Matrix& cost) {
  require_square(cost);
  const int n = static_cast<int>(cost.rows);
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based arrays; column 0 is the virtual unmatched column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  Assignment out;
  out.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.row_to_col[p[j] - 1] = j - 1;
  out.value = 0.0;
  for (int i = 0; i < n; ++i) out.value += cost.at(i, out.row_to_col[i]);
  out.row_potentials.assign(u.begin() + 1, u.end());
  out.col_potentials.assign(v.begin() + 1, v.end());
  return out;
}

}  // namespace revpref
