#include "revpref/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace revpref {

namespace {

void check_alpha(const std::vector<double>& alpha) {
  if (alpha.empty()) throw InputError("exponents: need at least one entry");
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0)) throw InputError("exponents must be strictly positive");
    sum += a;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw InputError("exponents must sum to 1, got " + std::to_string(sum));
  }
}

double log_uniform(std::mt19937_64& rng, SampleRange range) {
  if (!(range.lo > 0.0) || !(range.hi >= range.lo)) {
    throw InputError("sample range must satisfy 0 < lo <= hi");
  }
  std::uniform_real_distribution<double> exponent(std::log(range.lo),
                                                  std::log(range.hi));
  return std::exp(exponent(rng));
}

}  // namespace

SmoothDemandField SmoothDemandField::cobb_douglas(std::vector<double> alpha) {
  check_alpha(alpha);
  return {"cobb_douglas",
          [alpha = std::move(alpha)](const Bundle& x) {
            if (x.dimension() != alpha.size()) {
              throw InputError("cobb_douglas field: dimension mismatch");
            }
            std::vector<double> p(alpha.size());
            for (std::size_t k = 0; k < alpha.size(); ++k) {
              p[k] = alpha[k] / x[k];
            }
            return PriceVector(std::move(p));
          }};
}

SmoothDemandField SmoothDemandField::twisted() {
  return {"twisted", [](const Bundle& x) {
            if (x.dimension() < 2) {
              throw InputError("twisted field: needs dimension >= 2");
            }
            std::vector<double> p(x.values());
            p[0] = x[1] * x[1];
            p[1] = x[0];
            return PriceVector(std::move(p));
          }};
}

ClosedPath::ClosedPath(Curve curve, std::string tag)
    : curve_(std::move(curve)), tag_(std::move(tag)) {}

Bundle ClosedPath::at(double t) const {
  t -= std::floor(t);
  return Bundle(curve_(t));
}

ClosedPath ClosedPath::circle(std::vector<double> center, std::size_t axis_a,
                              std::size_t axis_b, double radius) {
  return ellipse(std::move(center), axis_a, axis_b, radius, radius);
}

ClosedPath ClosedPath::ellipse(std::vector<double> center, std::size_t axis_a,
                               std::size_t axis_b, double radius_a,
                               double radius_b, double phase) {
  if (axis_a >= center.size() || axis_b >= center.size() || axis_a == axis_b) {
    throw InputError("ellipse path: bad axes");
  }
  if (center[axis_a] - radius_a <= 0.0 || center[axis_b] - radius_b <= 0.0) {
    throw InputError("ellipse path: loop leaves the positive orthant");
  }
  std::string tag = "ellipse(r=" + std::to_string(radius_a) + "," +
                    std::to_string(radius_b) + ")";
  return ClosedPath(
      [center = std::move(center), axis_a, axis_b, radius_a, radius_b,
       phase](double t) {
        std::vector<double> x(center);
        const double w = 2.0 * std::numbers::pi * t + phase;
        x[axis_a] += radius_a * std::cos(w);
        x[axis_b] += radius_b * std::sin(w);
        return x;
      },
      std::move(tag));
}

ClosedPath ClosedPath::constant(std::vector<double> point) {
  return ClosedPath([point = std::move(point)](double) { return point; },
                    "constant");
}

CostFunction log_inner_cost() {
  return [](const Bundle& x, const PriceVector& p) { return std::log(inner(x, p)); };
}

namespace {

template <bool Parallel>
double path_sum_impl(const ClosedPath& path, const SmoothDemandField& field,
                     const CostFunction& cost, std::size_t n_steps) {
  if (n_steps < 2) throw InputError("discrete_path_sum: need N >= 2");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(n_steps);
  std::vector<Bundle> xs;
  xs.reserve(n_steps);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    xs.push_back(path.at(static_cast<double>(i) / static_cast<double>(n)));
  }
  std::vector<double> terms(n_steps);
#pragma omp parallel for schedule(static) if (Parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const PriceVector p = field.price_at(xs[i]);
    terms[i] = cost(xs[(i + 1) % n], p) - cost(xs[i], p);
  }
  double sum = 0.0;
  for (double t : terms) sum += t;  // fixed order keeps both variants equal
  return sum;
}

}  // namespace

double discrete_path_sum_serial(const ClosedPath& path,
                                const SmoothDemandField& field,
                                const CostFunction& cost, std::size_t n_steps) {
  return path_sum_impl<false>(path, field, cost, n_steps);
}

double discrete_path_sum_parallel(const ClosedPath& path,
                                  const SmoothDemandField& field,
                                  const CostFunction& cost,
                                  std::size_t n_steps) {
  return path_sum_impl<true>(path, field, cost, n_steps);
}

double discrete_path_sum(const ClosedPath& path, const SmoothDemandField& field,
                         const CostFunction& cost, std::size_t n_steps) {
  return path_sum_impl<true>(path, field, cost, n_steps);
}

PotentialityReport potentiality_check(const SmoothDemandField& field,
                                      const std::vector<ClosedPath>& paths,
                                      const CostFunction& cost,
                                      const std::vector<std::size_t>& n_values,
                                      double threshold) {
  if (n_values.empty()) throw InputError("potentiality_check: empty N ladder");
  PotentialityReport report;
  report.threshold = threshold;
  report.passed = true;
  for (const ClosedPath& path : paths) {
    PathDecay decay;
    decay.path_tag = path.tag();
    decay.n_values = n_values;
    for (std::size_t n : n_values) {
      decay.sums.push_back(discrete_path_sum(path, field, cost, n));
    }
    decay.decays = true;
    for (std::size_t t = 0; t + 1 < decay.sums.size(); ++t) {
      const double prev = std::fabs(decay.sums[t]);
      const double next = std::fabs(decay.sums[t + 1]);
      if (!(next < prev || next <= threshold)) decay.decays = false;
    }
    decay.small_at_finest = std::fabs(decay.sums.back()) <= threshold;
    report.passed = report.passed && decay.decays && decay.small_at_finest;
    report.paths.push_back(std::move(decay));
  }
  return report;
}

std::vector<double> numeric_gradient(
    const std::function<double(const Bundle&)>& f, const Bundle& x, double h) {
  if (!(h > 0.0)) throw InputError("numeric_gradient: h must be positive");
  const std::size_t m = x.dimension();
  std::vector<double> grad(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (x[k] - h <= 0.0) {
      throw InputError("numeric_gradient: probe leaves the positive orthant");
    }
    std::vector<double> up(x.values()), down(x.values());
    up[k] += h;
    down[k] -= h;
    grad[k] = (f(Bundle(std::move(up))) - f(Bundle(std::move(down)))) / (2.0 * h);
  }
  return grad;
}

InverseDemandReport check_inverse_demand(
    const std::function<std::vector<double>(const Bundle&)>& grad_v,
    const SmoothDemandField& field, const std::vector<Bundle>& points,
    double tolerance) {
  InverseDemandReport report;
  report.points = points.size();
  report.tolerance = tolerance;
  for (const Bundle& x : points) {
    const PriceVector p = field.price_at(x);
    const double w = inner(x, p);
    const std::vector<double> g = grad_v(x);
    if (g.size() != x.dimension()) {
      throw InputError("check_inverse_demand: gradient dimension mismatch");
    }
    for (std::size_t k = 0; k < x.dimension(); ++k) {
      report.max_residual =
          std::max(report.max_residual, std::fabs(p[k] / w - g[k]));
    }
  }
  report.passed = report.max_residual <= tolerance;
  return report;
}

Dataset gen_cobb_douglas(std::size_t n, std::size_t m,
                         const std::vector<double>& alpha,
                         SampleRange price_range, SampleRange income_range,
                         std::uint64_t seed) {
  if (alpha.size() != m) throw InputError("gen_cobb_douglas: |alpha| != m");
  check_alpha(alpha);
  if (n == 0) throw InputError("gen_cobb_douglas: n must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Observation> obs;
  obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p(m), x(m);
    for (std::size_t k = 0; k < m; ++k) p[k] = log_uniform(rng, price_range);
    const double income = log_uniform(rng, income_range);
    for (std::size_t k = 0; k < m; ++k) x[k] = alpha[k] * income / p[k];
    obs.push_back({static_cast<int>(i), Bundle(std::move(x)),
                   PriceVector(std::move(p))});
  }
  return Dataset(std::move(obs));
}

Dataset gen_ces(std::size_t n, std::size_t m, double rho,
                const std::vector<double>& weights, SampleRange price_range,
                SampleRange income_range, std::uint64_t seed) {
  if (weights.size() != m) throw InputError("gen_ces: |weights| != m");
  if (!(rho < 1.0) || rho == 0.0) {
    throw InputError("gen_ces: rho must satisfy rho < 1, rho != 0");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw InputError("gen_ces: weights must be positive");
  }
  if (n == 0) throw InputError("gen_ces: n must be positive");
  const double sigma = 1.0 / (1.0 - rho);
  std::mt19937_64 rng(seed);
  std::vector<Observation> obs;
  obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> p(m), x(m);
    for (std::size_t k = 0; k < m; ++k) p[k] = log_uniform(rng, price_range);
    const double income = log_uniform(rng, income_range);
    double denom = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      denom += std::pow(weights[k], sigma) * std::pow(p[k], 1.0 - sigma);
    }
    for (std::size_t k = 0; k < m; ++k) {
      x[k] = std::pow(weights[k] / p[k], sigma) * income / denom;
    }
    obs.push_back({static_cast<int>(i), Bundle(std::move(x)),
                   PriceVector(std::move(p))});
  }
  return Dataset(std::move(obs));
}

Dataset inject_violation(const Dataset& data, double strength,
                         std::uint64_t seed) {
  if (data.size() < 2) {
    throw InputError("inject_violation: needs at least two observations");
  }
  const double s = std::clamp(strength, 0.0, 1.0);
  if (s == 0.0) return data;
  const std::size_t n = data.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t start_i = pick(rng), start_j = pick(rng);

  // Scan ordered pairs from a seeded start for price vectors that are not
  // proportional; keep the widest log-ratio spread as a fallback.
  std::size_t best_i = start_i, best_j = (start_i + 1) % n;
  double best_spread = -1.0;
  for (std::size_t di = 0; di < n && best_spread <= 1e-6; ++di) {
    for (std::size_t dj = 0; dj < n && best_spread <= 1e-6; ++dj) {
      const std::size_t ci = (start_i + di) % n;
      const std::size_t cj = (start_j + dj) % n;
      if (ci == cj) continue;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t k = 0; k < data.dimension(); ++k) {
        const double g = std::log(data[ci].prices[k] / data[cj].prices[k]);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
      }
      const double spread = hi - lo;
      if (spread > best_spread) {
        best_spread = spread;
        best_i = ci;
        best_j = cj;
      }
    }
  }
  const std::size_t i = best_i, j = best_j;
  const Observation& vi = data[i];
  const Observation& vj = data[j];
  const std::size_t m = data.dimension();

  std::size_t k_up = 0, k_down = 0;
  double g_up = -std::numeric_limits<double>::infinity(), g_down = -g_up;
  for (std::size_t k = 0; k < m; ++k) {
    const double g = std::log(vi.prices[k] / vj.prices[k]);
    if (g > g_up) {
      g_up = g;
      k_up = k;
    }
    if (g < g_down) {
      g_down = g;
      k_down = k;
    }
  }

  // Tilt X^j toward the good that is relatively dear under P^i and cheap
  // under P^j. The admissible tilt ratios c1/c2 lie strictly between the
  // two price-weighted bounds; the geometric mean keeps both margins.
  const double lo = (vi.prices[k_down] * vj.bundle[k_down]) /
                    (vi.prices[k_up] * vj.bundle[k_up]);
  const double hi = (vj.prices[k_down] * vj.bundle[k_down]) /
                    (vj.prices[k_up] * vj.bundle[k_up]);
  const double c2 = 0.5;
  const double c1 = std::sqrt(lo * hi) * c2;
  std::vector<double> tilted(vj.bundle.values());
  tilted[k_up] *= 1.0 + c1;
  tilted[k_down] *= 1.0 - c2;

  std::vector<Observation> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    if (t != i) {
      out.push_back(data[t]);
      continue;
    }
    std::vector<double> blend(m);
    for (std::size_t k = 0; k < m; ++k) {
      blend[k] = std::pow(data[t].bundle[k], 1.0 - s) * std::pow(tilted[k], s);
    }
    out.push_back({data[t].index, Bundle(std::move(blend)), data[t].prices});
  }
  return Dataset(std::move(out));
}

}  // namespace revpref
