#pragma once

// Shared generators and brute-force oracles for the test suites.

#include <cmath>
#include <cstdint>
#include <vector>

#include "kszlab/ksz.hpp"
#include "kszlab/rng.hpp"
#include "kszlab/tensor.hpp"

namespace kszlab::testing {

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Uniform values in [-1, 1].
inline std::vector<double> random_vector(CounterRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
  return v;
}

inline PointTuple random_point(CounterRng& rng, const Shape& shape) {
  PointTuple x;
  for (auto n : shape.dims()) x.push_back(random_vector(rng, n));
  return x;
}

/// Random shape with d in [1, max_d] and each n in [1, max_n].
inline Shape random_shape(CounterRng& rng, std::size_t max_d, std::size_t max_n) {
  const std::size_t d = 1 + static_cast<std::size_t>(rng() % max_d);
  std::vector<std::size_t> dims(d);
  for (auto& n : dims) n = 1 + static_cast<std::size_t>(rng() % max_n);
  return Shape(dims);
}

/// Direct monomial sum, no contraction.
inline double naive_evaluate(const SignTensor& a, const PointTuple& x) {
  const Shape& shape = a.shape();
  double total = 0.0;
  std::vector<std::size_t> idx(shape.order(), 0);
  for (std::size_t flat = 0; flat < a.size(); ++flat) {
    double term = a[flat];
    for (std::size_t k = 0; k < shape.order(); ++k) term *= x[k][idx[k]];
    total += term;
    for (std::size_t k = shape.order(); k-- > 0;) {
      if (++idx[k] < shape.dim(k)) break;
      idx[k] = 0;
    }
  }
  return total;
}

/// Max of |A(x)| over every +-1 assignment of every coordinate.
inline double brute_force_linf(const SignTensor& a) {
  const Shape& shape = a.shape();
  const std::size_t bits = shape.dim_sum();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    PointTuple x;
    std::size_t bit = 0;
    for (auto n : shape.dims()) {
      std::vector<double> v(n);
      for (auto& e : v) e = ((mask >> bit++) & 1u) ? -1.0 : 1.0;
      x.push_back(std::move(v));
    }
    best = std::max(best, std::abs(naive_evaluate(a, x)));
  }
  return best;
}

inline SignTensor hadamard2() { return SignTensor(Shape({2, 2}), {1, 1, 1, -1}); }

}  // namespace kszlab::testing
