// Core domain types: positive bundles and price vectors, observations,
// datasets, and the bi-homogeneous kernel that defines the log cost.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace revpref {

inline constexpr double kDefaultTolerance = 1e-9;

/// Invalid input: bad dimensions, nonpositive coordinates, malformed files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An oracle was asked to enumerate beyond its configured size cap.
class CapError : public InputError {
 public:
  using InputError::InputError;
};

/// A solver could not certify its own result (iteration cap, ambiguous
/// feasibility). Never used to mask a wrong answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
std::vector<double> checked_positive(std::vector<double> v, const char* what);
}

/// Quantities of the m goods. Every coordinate strictly positive.
class Bundle {
 public:
  explicit Bundle(std::vector<double> q)
      : q_(detail::checked_positive(std::move(q), "bundle")) {}

  std::size_t dimension() const { return q_.size(); }
  double operator[](std::size_t k) const { return q_[k]; }
  const std::vector<double>& values() const { return q_; }

  Bundle scaled(double t) const;
  double euclidean_norm() const;

 private:
  std::vector<double> q_;
};

/// Price per unit of each good. Every coordinate strictly positive.
class PriceVector {
 public:
  explicit PriceVector(std::vector<double> p)
      : p_(detail::checked_positive(std::move(p), "price vector")) {}

  std::size_t dimension() const { return p_.size(); }
  double operator[](std::size_t k) const { return p_[k]; }
  const std::vector<double>& values() const { return p_; }

  PriceVector scaled(double t) const;
  double euclidean_norm() const;

 private:
  std::vector<double> p_;
};

/// One observed choice: the bundle bought at the posted prices.
struct Observation {
  int index;
  Bundle bundle;
  PriceVector prices;
};

/// Ordered list of observations sharing one dimension m. Immutable.
class Dataset {
 public:
  explicit Dataset(std::vector<Observation> observations);

  /// Convenience constructor: indices assigned by position.
  static Dataset from_pairs(
      const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
          quantity_price_pairs);

  std::size_t size() const { return observations_.size(); }
  std::size_t dimension() const { return dimension_; }
  const Observation& operator[](std::size_t i) const { return observations_[i]; }

  auto begin() const { return observations_.begin(); }
  auto end() const { return observations_.end(); }

 private:
  std::vector<Observation> observations_;
  std::size_t dimension_;
};

/// Pluggable price-bundle pairing b(x, y): strictly positive on positive
/// vectors and homogeneous in each argument, b(tx, y) = b(x, ty) = t b(x, y).
struct Kernel {
  std::string tag;
  std::function<double(std::span<const double>, std::span<const double>)> eval;

  double operator()(const Bundle& x, const PriceVector& p) const;

  /// The standard inner product, tag "inner".
  static const Kernel& standard_inner();
};

/// Sum_k x_k p_k. Throws InputError on dimension mismatch.
double inner(const Bundle& x, const PriceVector& p);

/// ln b(x, p). All cost arithmetic stays in the log domain; products of
/// inner products around a cycle become sums and cannot overflow.
double log_cost(const Bundle& x, const PriceVector& p,
                const Kernel& kernel = Kernel::standard_inner());

/// Dense row-major matrix, the workhorse for cost tables and plans.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

namespace detail {
/// Deterministic per-stream RNG seed so parallel and serial sampling see the
/// same substreams (splitmix64 of the pair).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);
}  // namespace detail

}  // namespace revpref
