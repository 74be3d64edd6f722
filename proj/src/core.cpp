#include "revpref/core.hpp"

#include <algorithm>
#include <cmath>

namespace revpref {

namespace detail {

std::vector<double> checked_positive(std::vector<double> v, const char* what) {
  if (v.empty()) {
    throw InputError(std::string(what) + ": dimension must be at least 1");
  }
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] > 0.0) || !std::isfinite(v[k])) {
      throw InputError(std::string(what) + ": coordinate " + std::to_string(k) +
                       " is not strictly positive");
    }
  }
  return v;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 on the combined word
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

Bundle Bundle::scaled(double t) const {
  std::vector<double> out(q_);
  for (double& c : out) c *= t;
  return Bundle(std::move(out));
}

double Bundle::euclidean_norm() const {
  double s = 0.0;
  for (double c : q_) s += c * c;
  return std::sqrt(s);
}

PriceVector PriceVector::scaled(double t) const {
  std::vector<double> out(p_);
  for (double& c : out) c *= t;
  return PriceVector(std::move(out));
}

double PriceVector::euclidean_norm() const {
  double s = 0.0;
  for (double c : p_) s += c * c;
  return std::sqrt(s);
}

Dataset::Dataset(std::vector<Observation> observations)
    : observations_(std::move(observations)) {
  if (observations_.empty()) {
    throw InputError("dataset: needs at least one observation");
  }
  dimension_ = observations_[0].bundle.dimension();
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    const Observation& o = observations_[i];
    if (o.index != static_cast<int>(i)) {
      throw InputError("dataset: observation indices must be 0..n-1 in order");
    }
    if (o.bundle.dimension() != dimension_ ||
        o.prices.dimension() != dimension_) {
      throw InputError("dataset: observation " + std::to_string(i) +
                       " does not match dimension " +
                       std::to_string(dimension_));
    }
  }
}

Dataset Dataset::from_pairs(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
        quantity_price_pairs) {
  std::vector<Observation> obs;
  obs.reserve(quantity_price_pairs.size());
  int i = 0;
  for (const auto& [q, p] : quantity_price_pairs) {
    obs.push_back({i++, Bundle(q), PriceVector(p)});
  }
  return Dataset(std::move(obs));
}

double Kernel::operator()(const Bundle& x, const PriceVector& p) const {
  if (x.dimension() != p.dimension()) {
    throw InputError("kernel: bundle dimension " +
                     std::to_string(x.dimension()) +
                     " != price dimension " + std::to_string(p.dimension()));
  }
  return eval(std::span<const double>(x.values()),
              std::span<const double>(p.values()));
}

const Kernel& Kernel::standard_inner() {
  static const Kernel k{
      "inner", [](std::span<const double> x, std::span<const double> y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
      }};
  return k;
}

double inner(const Bundle& x, const PriceVector& p) {
  if (x.dimension() != p.dimension()) {
    throw InputError("inner: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < x.dimension(); ++k) s += x[k] * p[k];
  return s;
}

double log_cost(const Bundle& x, const PriceVector& p, const Kernel& kernel) {
  double b = kernel(x, p);
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw InputError("log_cost: kernel '" + kernel.tag +
                     "' returned a nonpositive or nonfinite value");
  }
  return std::log(b);
}

}  // namespace revpref
