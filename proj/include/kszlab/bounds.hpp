#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kszlab/exponent.hpp"
#include "kszlab/norm.hpp"
#include "kszlab/tensor.hpp"

namespace kszlab {

/// f(n) = (n_1^{1/2} + ... + n_d^{1/2}) prod n_j^{1/2 - 1/p_j}; every p_j >= 2.
double f_growth(const Shape& shape, const PExponents& p);

/// 1 / (d 2^{(d-1)/2}).
double lower_constant(std::size_t d);

/// lower_constant(d) * f_growth: no unimodular form has a smaller norm.
double lower_bound_value(const Shape& shape, const PExponents& p);

/// (sum n_k^{1 - 1/gamma}) prod n_k^{max(1/gamma - 1/p_k, 0)} for any p.
double conjecture_growth(const Shape& shape, const PExponents& p);

enum class Placement {
  kOuterL1,  ///< sum over the pivot of the l_2 norm over the other indices
  kInnerL1,  ///< l_2 over the other indices of the l_1 sum over the pivot
};

/// Littlewood (l_1, l_2) mixed sum of the coefficients. For every form it is
/// at most (sqrt 2)^{d-1} times the norm on l_inf^{n_1} x ... x l_inf^{n_d}.
double littlewood_mixed_sum(const SignTensor& a, std::size_t pivot, Placement placement);

struct WindowRow {
  std::uint64_t seed = 0;  // draw seed, or the sign pattern in exhaustive mode
  std::size_t trial = 0;
  double norm_lower = 0.0;
  double norm_upper = 0.0;
  double ratio = 0.0;
  std::string method;
};

enum class WindowMode { kSampled, kExhaustive };

struct WindowOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  /// Enumerate every sign tensor of the shape instead of sampling
  /// (at most 2^24 of them).
  bool exhaustive = false;
  NormConfig norm;
  std::size_t workers = 1;
};

struct WindowReport {
  Shape shape;
  PExponents p;
  WindowMode mode = WindowMode::kSampled;
  std::vector<WindowRow> rows;
  double min_ratio = 0.0;
  double lower_const = 0.0;
  /// ksz_bound / f_growth: the ratio the sampled construction guarantees.
  double upper_const = 0.0;
  double f_value = 0.0;
  /// Some ratio fell below lower_const - 1e-9.
  bool violated = false;
  /// min_ratio exceeded upper_const (too few trials; a warning).
  bool under_sampled = false;
};

/// Norms of sampled (or all) unimodular forms divided by f_growth. Needs
/// every p_j >= 2 and an exact norm method for the shape.
WindowReport window_experiment(const Shape& shape, const PExponents& p,
                               const WindowOptions& options = {});

/// Header seed,trial,norm_lower,norm_upper,ratio,method and one line per row.
std::string window_csv(const WindowReport& report);

nlohmann::json window_summary_json(const WindowReport& report);

}  // namespace kszlab
