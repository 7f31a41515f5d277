#include "kszlab/bounds.hpp"

#include <cmath>
#include <limits>

#include "kszlab/errors.hpp"
#include "kszlab/format.hpp"
#include "kszlab/ksz.hpp"
#include "kszlab/parallel.hpp"
#include "kszlab/rng.hpp"
#include "kszlab/serialization.hpp"

namespace kszlab {

namespace {

void check_p_at_least_two(const Shape& shape, const PExponents& p) {
  if (p.size() != shape.order()) {
    throw InvalidArgument("expected " + std::to_string(shape.order()) +
                          " exponents, got " + std::to_string(p.size()));
  }
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] < Exponent(2.0)) {
      throw InvalidArgument("growth function needs p >= 2, but p[" + std::to_string(k) +
                            "] = " + to_string(p[k]));
    }
  }
}

}  // namespace

double f_growth(const Shape& shape, const PExponents& p) {
  check_p_at_least_two(shape, p);
  double sum = 0.0;
  double prod = 1.0;
  for (std::size_t k = 0; k < shape.order(); ++k) {
    const double n = static_cast<double>(shape.dim(k));
    sum += std::sqrt(n);
    prod *= std::pow(n, 0.5 - p[k].reciprocal());
  }
  return sum * prod;
}

double lower_constant(std::size_t d) {
  if (d == 0) throw InvalidArgument("d must be >= 1");
  return 1.0 / (static_cast<double>(d) * std::pow(2.0, (static_cast<double>(d) - 1.0) / 2.0));
}

double lower_bound_value(const Shape& shape, const PExponents& p) {
  return lower_constant(shape.order()) * f_growth(shape, p);
}

double conjecture_growth(const Shape& shape, const PExponents& p) {
  if (p.size() != shape.order()) {
    throw InvalidArgument("expected " + std::to_string(shape.order()) +
                          " exponents, got " + std::to_string(p.size()));
  }
  const double gamma = ksz_gamma(p);
  double sum = 0.0;
  double prod = 1.0;
  for (std::size_t k = 0; k < shape.order(); ++k) {
    const double n = static_cast<double>(shape.dim(k));
    sum += std::pow(n, 1.0 - 1.0 / gamma);
    prod *= std::pow(n, std::max(1.0 / gamma - p[k].reciprocal(), 0.0));
  }
  return sum * prod;
}

double littlewood_mixed_sum(const SignTensor& a, std::size_t pivot, Placement placement) {
  const Shape& shape = a.shape();
  if (pivot >= shape.order()) {
    throw InvalidArgument("pivot " + std::to_string(pivot) + " out of range for order " +
                          std::to_string(shape.order()));
  }
  const std::size_t n = shape.dim(pivot);
  const std::size_t stride = shape.stride(pivot);
  const std::size_t others = shape.size() / n;
  if (placement == Placement::kOuterL1) {
    std::vector<double> sumsq(n, 0.0);
    for (std::size_t flat = 0; flat < a.size(); ++flat) {
      const double v = a[flat];
      sumsq[(flat / stride) % n] += v * v;
    }
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) terms[i] = std::sqrt(sumsq[i]);
    return pairwise_sum(terms);
  }
  std::vector<double> abs_sum(others, 0.0);
  for (std::size_t flat = 0; flat < a.size(); ++flat) {
    const std::size_t rest = (flat / (stride * n)) * stride + flat % stride;
    abs_sum[rest] += std::abs(static_cast<double>(a[flat]));
  }
  return lp_norm(abs_sum, Exponent(2.0));
}

WindowReport window_experiment(const Shape& shape, const PExponents& p,
                               const WindowOptions& options) {
  WindowReport report;
  report.shape = shape;
  report.p = p;
  report.f_value = f_growth(shape, p);
  report.lower_const = lower_constant(shape.order());
  report.upper_const = ksz_bound(shape, p) / report.f_value;
  if (!has_exact_method(shape, p, options.norm.budget)) {
    throw CertificationUnavailable(
        "window experiment needs an exact norm method (p all inf within budget, "
        "d = 1, or p = (2, 2))");
  }

  std::size_t count = options.trials;
  if (options.exhaustive) {
    if (shape.size() > 24) {
      throw BudgetExceeded("exhaustive window over 2^" + std::to_string(shape.size()) +
                               " tensors exceeds the 2^24 cap",
                           static_cast<double>(shape.size()));
    }
    report.mode = WindowMode::kExhaustive;
    count = std::size_t{1} << shape.size();
  }
  if (count == 0) throw InvalidArgument("trials must be >= 1");

  NormConfig inner = options.norm;
  inner.workers = 1;
  report.rows.resize(count);
  parallel_for(count, options.workers, [&](std::size_t t) {
    WindowRow& row = report.rows[t];
    row.trial = t;
    row.seed = options.exhaustive ? t : mix_seed(options.seed, t);
    const SignTensor a = options.exhaustive ? SignTensor::from_pattern(shape, t)
                                            : sample_signs(shape, row.seed);
    const BoundReport norm = norm_bracket(a, p, inner);
    row.norm_lower = norm.lower;
    row.norm_upper = norm.upper;
    row.ratio = norm.lower / report.f_value;
    row.method = norm.lower_method;
  });

  report.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& row : report.rows) {
    report.min_ratio = std::min(report.min_ratio, row.ratio);
    if (row.ratio < report.lower_const - 1e-9) report.violated = true;
  }
  report.under_sampled = report.min_ratio > report.upper_const;
  return report;
}

std::string window_csv(const WindowReport& report) {
  std::string out = "seed,trial,norm_lower,norm_upper,ratio,method\n";
  for (const auto& row : report.rows) {
    out += std::to_string(row.seed) + ',' + std::to_string(row.trial) + ',' +
           format_double(row.norm_lower) + ',' + format_double(row.norm_upper) + ',' +
           format_double(row.ratio) + ',' + row.method + '\n';
  }
  return out;
}

nlohmann::json window_summary_json(const WindowReport& report) {
  nlohmann::json j;
  j["min_ratio"] = report.min_ratio;
  j["lower_const"] = report.lower_const;
  j["upper_const"] = report.upper_const;
  j["f_value"] = report.f_value;
  j["violated"] = report.violated;
  j["under_sampled"] = report.under_sampled;
  j["mode"] = report.mode == WindowMode::kExhaustive ? "exhaustive" : "sampled";
  j["trials"] = report.rows.size();
  j["dims"] = report.shape.dims();
  j["p"] = exponents_to_json(report.p);
  return j;
}

}  // namespace kszlab
