#include "kszlab/tensor.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "kszlab/errors.hpp"

namespace kszlab {

namespace {

// Contracts the middle axis of a (outer, n, inner) row-major block with x.
std::vector<double> contract_axis(std::span<const double> values,
                                  std::size_t outer, std::size_t n,
                                  std::size_t inner, std::span<const double> x) {
  std::vector<double> out(outer * inner);
  std::vector<double> terms(n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * n * inner + i;
      for (std::size_t j = 0; j < n; ++j) terms[j] = values[base + j * inner] * x[j];
      out[o * inner + i] = pairwise_sum(terms);
    }
  }
  return out;
}

}  // namespace

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidArgument("shape must have at least one coordinate");
  const std::size_t limit = std::vector<double>().max_size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] == 0) {
      throw InvalidArgument("dimension n[" + std::to_string(k) + "] must be >= 1");
    }
    if (total > limit / dims_[k]) {
      throw InvalidArgument("tensor size exceeds the addressable limit");
    }
    total *= dims_[k];
  }
  size_ = total;
}

std::size_t Shape::dim_sum() const {
  return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0});
}

std::size_t Shape::stride(std::size_t k) const {
  std::size_t s = 1;
  for (std::size_t j = k + 1; j < dims_.size(); ++j) s *= dims_[j];
  return s;
}

std::size_t Shape::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw InvalidArgument("index order mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (index[k] >= dims_[k]) throw InvalidArgument("index out of range");
    flat = flat * dims_[k] + index[k];
  }
  return flat;
}

SignTensor::SignTensor(Shape shape, std::vector<std::int8_t> signs)
    : shape_(std::move(shape)), signs_(std::move(signs)) {
  if (signs_.size() != shape_.size()) {
    throw InvalidArgument("sign count " + std::to_string(signs_.size()) +
                          " does not match shape size " +
                          std::to_string(shape_.size()));
  }
  for (auto s : signs_) {
    if (s != 1 && s != -1) throw InvalidArgument("coefficients must be -1 or +1");
  }
}

SignTensor SignTensor::ones(Shape shape) {
  std::vector<std::int8_t> signs(shape.size(), 1);
  return SignTensor(std::move(shape), std::move(signs));
}

SignTensor SignTensor::from_pattern(Shape shape, std::uint64_t pattern) {
  if (shape.size() > 64) throw InvalidArgument("pattern tensors hold at most 64 entries");
  std::vector<std::int8_t> signs(shape.size());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    signs[i] = ((pattern >> i) & 1u) ? -1 : 1;
  }
  return SignTensor(std::move(shape), std::move(signs));
}

std::vector<double> SignTensor::as_doubles() const {
  return std::vector<double>(signs_.begin(), signs_.end());
}

void check_point_lengths(const Shape& shape, const PointTuple& x,
                         std::size_t skip) {
  if (x.size() != shape.order()) {
    throw InvalidArgument("point has " + std::to_string(x.size()) +
                          " coordinates, tensor has order " +
                          std::to_string(shape.order()));
  }
  for (std::size_t k = 0; k < shape.order(); ++k) {
    if (k != skip && x[k].size() != shape.dim(k)) {
      throw InvalidArgument("coordinate " + std::to_string(k) + " has length " +
                            std::to_string(x[k].size()) + ", expected " +
                            std::to_string(shape.dim(k)));
    }
  }
}

double evaluate(const SignTensor& a, const PointTuple& x) {
  const Shape& shape = a.shape();
  check_point_lengths(shape, x, shape.order());
  std::vector<double> cur = a.as_doubles();
  for (std::size_t k = shape.order(); k-- > 0;) {
    const std::size_t n = shape.dim(k);
    cur = contract_axis(cur, cur.size() / n, n, 1, x[k]);
  }
  return cur.front();
}

std::vector<double> partial_coefficients(const SignTensor& a,
                                         const PointTuple& x, std::size_t k) {
  const Shape& shape = a.shape();
  if (k >= shape.order()) {
    throw InvalidArgument("coordinate " + std::to_string(k) +
                          " out of range for order " +
                          std::to_string(shape.order()));
  }
  check_point_lengths(shape, x, k);
  std::vector<double> cur = a.as_doubles();
  for (std::size_t j = shape.order(); j-- > k + 1;) {
    const std::size_t n = shape.dim(j);
    cur = contract_axis(cur, cur.size() / n, n, 1, x[j]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t n = shape.dim(j);
    cur = contract_axis(cur, 1, n, cur.size() / n, x[j]);
  }
  return cur;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double lp_norm(std::span<const double> v, Exponent p) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  if (m == 0.0 || p.is_infinite()) return m;
  std::vector<double> terms(v.size());
  if (p.value() == 1.0) {
    for (std::size_t i = 0; i < v.size(); ++i) terms[i] = std::abs(v[i]);
    return pairwise_sum(terms);
  }
  const double e = p.value();
  for (std::size_t i = 0; i < v.size(); ++i) terms[i] = std::pow(std::abs(v[i]) / m, e);
  return m * std::pow(pairwise_sum(terms), 1.0 / e);
}

DualMaximizer dual_maximizer(std::span<const double> c, Exponent p) {
  if (c.empty()) throw InvalidArgument("dual_maximizer needs a non-empty vector");
  DualMaximizer out;
  out.point.assign(c.size(), 0.0);
  double m = 0.0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (std::abs(c[i]) > m) {
      m = std::abs(c[i]);
      argmax = i;
    }
  }
  if (m == 0.0) return out;

  if (p.is_infinite()) {
    for (std::size_t i = 0; i < c.size(); ++i) out.point[i] = c[i] < 0.0 ? -1.0 : 1.0;
    out.value = lp_norm(c, Exponent(1.0));
    return out;
  }
  if (p.value() == 1.0) {
    out.point[argmax] = c[argmax] < 0.0 ? -1.0 : 1.0;
    out.value = m;
    return out;
  }
  const double q = p.conjugate().value();
  out.value = lp_norm(c, Exponent(q));
  const double denom = std::pow(out.value / m, q - 1.0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double mag = std::pow(std::abs(c[i]) / m, q - 1.0) / denom;
    out.point[i] = c[i] < 0.0 ? -mag : mag;
  }
  return out;
}

double mixed_norm(const DenseTensor& t, const MixedNormSpec& spec) {
  const std::size_t order = t.shape.order();
  if (spec.rhos.size() != order) {
    throw InvalidArgument("mixed norm needs " + std::to_string(order) +
                          " exponents, got " + std::to_string(spec.rhos.size()));
  }
  if (t.values.size() != t.shape.size()) {
    throw InvalidArgument("tensor value count does not match its shape");
  }
  for (double rho : spec.rhos) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
      throw InvalidArgument("mixed-norm exponents must be positive and finite");
    }
  }
  std::vector<double> cur(t.values.size());
  for (std::size_t i = 0; i < cur.size(); ++i) {
    if (!std::isfinite(t.values[i])) {
      throw InvalidArgument("mixed norm of a tensor with non-finite entry at " +
                            std::to_string(i));
    }
    cur[i] = std::abs(t.values[i]);
  }
  for (std::size_t level = order; level-- > 0;) {
    const std::size_t n = t.shape.dim(level);
    const std::size_t outer = cur.size() / n;
    std::vector<double> next(outer);
    for (std::size_t o = 0; o < outer; ++o) {
      next[o] = lp_norm(std::span<const double>(cur).subspan(o * n, n),
                        Exponent(spec.rhos[level]));
    }
    cur = std::move(next);
  }
  return cur.front();
}

DenseTensor diagonal_block_tensor(const SignTensor& a,
                                  std::span<const std::size_t> blocks) {
  const Shape& shape = a.shape();
  std::size_t total = 0;
  for (auto m : blocks) {
    if (m == 0) throw InvalidArgument("block sizes must be >= 1");
    total += m;
  }
  if (blocks.empty() || total != shape.order()) {
    throw InvalidArgument("block sizes must sum to the tensor order " +
                          std::to_string(shape.order()));
  }
  std::vector<std::size_t> dims;
  std::vector<std::size_t> block_stride;
  std::size_t coord = 0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t n = shape.dim(coord);
    std::size_t stride = 0;
    for (std::size_t c = coord; c < coord + blocks[b]; ++c) {
      if (shape.dim(c) != n) {
        throw InvalidArgument("block " + std::to_string(b) +
                              " mixes dimensions " + std::to_string(n) + " and " +
                              std::to_string(shape.dim(c)));
      }
      stride += shape.stride(c);
    }
    dims.push_back(n);
    block_stride.push_back(stride);
    coord += blocks[b];
  }
  DenseTensor out{Shape(dims), {}};
  out.values.resize(out.shape.size());
  std::vector<std::size_t> idx(dims.size(), 0);
  for (std::size_t flat = 0; flat < out.values.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t b = 0; b < dims.size(); ++b) src += idx[b] * block_stride[b];
    out.values[flat] = a[src];
    for (std::size_t b = dims.size(); b-- > 0;) {
      if (++idx[b] < dims[b]) break;
      idx[b] = 0;
    }
  }
  return out;
}

}  // namespace kszlab
