#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kszlab/exponent.hpp"

namespace kszlab {

/// Dimension tuple (n_1, ..., n_d). Indices are zero based and storage is
/// row-major (last index fastest), so the one-based multi-index
/// (j_1, ..., j_d) lives at flat offset sum_k (j_k - 1) * stride_k.
class Shape {
public:
  Shape() = default;
  explicit Shape(std::vector<std::size_t> dims);

  std::size_t order() const { return dims_.size(); }
  std::size_t dim(std::size_t k) const { return dims_[k]; }
  const std::vector<std::size_t>& dims() const { return dims_; }

  /// Product of the dimensions.
  std::size_t size() const { return size_; }

  /// Sum of the dimensions.
  std::size_t dim_sum() const;

  /// Row-major stride of coordinate k.
  std::size_t stride(std::size_t k) const;

  std::size_t flat_index(std::span<const std::size_t> index) const;

  friend bool operator==(const Shape&, const Shape&) = default;

private:
  std::vector<std::size_t> dims_;
  std::size_t size_ = 0;
};

/// Coefficient tensor of a unimodular form; every entry is -1 or +1.
class SignTensor {
public:
  SignTensor() = default;
  SignTensor(Shape shape, std::vector<std::int8_t> signs);

  /// All entries +1.
  static SignTensor ones(Shape shape);

  /// Entry i is -1 exactly when bit i of `pattern` is set. Needs size <= 64.
  static SignTensor from_pattern(Shape shape, std::uint64_t pattern);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.order(); }
  std::size_t size() const { return signs_.size(); }

  std::int8_t operator[](std::size_t flat) const { return signs_[flat]; }
  std::int8_t at(std::span<const std::size_t> index) const {
    return signs_[shape_.flat_index(index)];
  }
  std::span<const std::int8_t> signs() const { return signs_; }

  std::vector<double> as_doubles() const;

  friend bool operator==(const SignTensor&, const SignTensor&) = default;

private:
  Shape shape_;
  std::vector<std::int8_t> signs_;
};

/// Dense real tensor, row-major.
struct DenseTensor {
  Shape shape;
  std::vector<double> values;
};

/// One vector per coordinate: (x^1, ..., x^d).
using PointTuple = std::vector<std::vector<double>>;

/// Throws InvalidArgument unless x^k has length n_k for every k other than
/// `skip` (pass order() to check all coordinates).
void check_point_lengths(const Shape& shape, const PointTuple& x,
                         std::size_t skip);

/// A(x^1, ..., x^d) = sum_j eps_j x^1_{j_1} ... x^d_{j_d}, by contracting the
/// last axis d times with pairwise summation.
double evaluate(const SignTensor& a, const PointTuple& x);

/// Coefficients c with A(x) = <c, x^k>; x^k itself is ignored (may be empty).
std::vector<double> partial_coefficients(const SignTensor& a,
                                         const PointTuple& x, std::size_t k);

/// Pairwise (cascade) sum.
double pairwise_sum(std::span<const double> values);

/// ||v||_p, computed with max-scaling so large p do not overflow.
double lp_norm(std::span<const double> v, Exponent p);

struct DualMaximizer {
  std::vector<double> point;
  double value = 0.0;
};

/// Maximizes <c, x> over the unit ball of l_p. The value is ||c||_{p'}.
/// sign(0) is taken as +1 and ties for p = 1 go to the lowest index; c = 0
/// returns the zero vector.
DualMaximizer dual_maximizer(std::span<const double> c, Exponent p);

/// Exponents and optional block partition for an iterated mixed norm.
struct MixedNormSpec {
  std::vector<double> rhos;
  std::vector<std::size_t> blocks;  // empty: every block has size one
};

/// Iterated norm (sum_{j_1} ( ... (sum_{j_k} |T|^{rho_k})^{rho_{k-1}/rho_k}
/// ... )^{rho_1/rho_2})^{1/rho_1}. The block partition in `spec` is not used
/// here; see diagonal_block_tensor.
double mixed_norm(const DenseTensor& t, const MixedNormSpec& spec);

/// Order-k restriction T(e_{j_1}^{m_1}, ..., e_{j_k}^{m_k}): entry
/// (j_1, ..., j_k) is the coefficient at the multi-index that repeats j_1
/// m_1 times, ..., j_k m_k times. All dims inside a block must agree.
DenseTensor diagonal_block_tensor(const SignTensor& a,
                                  std::span<const std::size_t> blocks);

}  // namespace kszlab
