#include "kszlab/ksz.hpp"

#include <algorithm>
#include <cmath>

#include "kszlab/rng.hpp"
#include "kszlab/serialization.hpp"

namespace kszlab {

namespace {

double factorial(std::size_t d) {
  if (d > 170) return std::exp(std::lgamma(static_cast<double>(d) + 1.0));
  double f = 1.0;
  for (std::size_t i = 2; i <= d; ++i) f *= static_cast<double>(i);
  return f;
}

void check_p(const Shape& shape, const PExponents& p) {
  if (p.size() != shape.order()) {
    throw InvalidArgument("expected " + std::to_string(shape.order()) +
                          " exponents, got " + std::to_string(p.size()));
  }
  validate_p_exponents(p);
}

}  // namespace

double ksz_constant(std::size_t d, const PExponents& p) {
  if (d == 0) throw InvalidArgument("d must be >= 1");
  if (p.size() != d) {
    throw InvalidArgument("expected " + std::to_string(d) + " exponents, got " +
                          std::to_string(p.size()));
  }
  validate_p_exponents(p);
  const double inv_pmax = max_exponent(p).reciprocal();
  const double exponent = 1.0 - std::max(0.5, inv_pmax);
  return 8.0 * std::pow(factorial(d), exponent) *
         std::sqrt(std::log(1.0 + 4.0 * static_cast<double>(d)));
}

double ksz_gamma(const PExponents& p) {
  validate_p_exponents(p);
  double best = 0.0;
  bool any = false;
  for (const auto& e : p) {
    if (!e.is_infinite() && e.value() <= 2.0) {
      best = any ? std::max(best, e.value()) : e.value();
      any = true;
    }
  }
  return any ? std::min(2.0, best) : 2.0;
}

double ksz_bound(const Shape& shape, const PExponents& p) {
  check_p(shape, p);
  const double gamma = ksz_gamma(p);
  const double e = 1.0 - 1.0 / gamma;
  double bound = std::pow(ksz_constant(shape.order(), p), 2.0 * e) *
                 std::pow(static_cast<double>(shape.dim_sum()), e);
  for (std::size_t k = 0; k < shape.order(); ++k) {
    bound *= std::pow(static_cast<double>(shape.dim(k)),
                      std::max(1.0 / gamma - p[k].reciprocal(), 0.0));
  }
  return bound;
}

double ksz_bound_gamma2(const Shape& shape, const PExponents& p) {
  check_p(shape, p);
  double prod = 1.0;
  for (std::size_t k = 0; k < shape.order(); ++k) {
    prod *= std::pow(static_cast<double>(shape.dim(k)),
                     std::max(0.5 - p[k].reciprocal(), 0.0));
  }
  return ksz_constant(shape.order(), p) * prod *
         std::sqrt(static_cast<double>(shape.dim_sum()));
}

Threshold threshold_R_lambda(const Shape& shape, const PExponents& p) {
  check_p(shape, p);
  const double d = static_cast<double>(shape.order());
  const Exponent pmax = max_exponent(p);
  const double inv_m = std::max(0.5, pmax.reciprocal());  // 1 / min(p, 2)
  Threshold t;
  t.denominator = std::pow(factorial(shape.order()), 2.0 * (1.0 - inv_m));
  for (std::size_t k = 0; k < shape.order(); ++k) {
    const double inv_M = std::min(0.5, p[k].reciprocal());  // 1 / max(p_k, 2)
    t.denominator *= std::pow(static_cast<double>(shape.dim(k)), 2.0 * (0.5 - inv_M));
  }
  const double log_term = std::log(8.0) + 2.0 * static_cast<double>(shape.dim_sum()) *
                                              std::log(1.0 + 4.0 * d);
  t.R = std::sqrt(2.0 * t.denominator * log_term);
  t.lambda = t.R / t.denominator;
  return t;
}

double covering_count(double r, std::size_t n) {
  if (!(r > 0.0)) throw InvalidArgument("covering radius must be positive");
  if (n == 0) throw InvalidArgument("covering dimension must be >= 1");
  return 2.0 * static_cast<double>(n) * std::log1p(2.0 / r);
}

double xi_constant(double xi, std::size_t d, const Shape& shape) {
  if (!(xi > 1.0)) throw InvalidArgument("xi must exceed 1 so that 1/xi is a probability below 1");
  if (d == 0) throw InvalidArgument("d must be >= 1");
  const double first = std::log(4.0 * xi);
  const double second = 2.0 * static_cast<double>(shape.dim_sum()) *
                        std::log(1.0 + 4.0 * static_cast<double>(d));
  return std::sqrt(2.0) * std::sqrt(std::max(first, second));
}

KszParameters ksz_parameters(const Shape& shape, const PExponents& p) {
  check_p(shape, p);
  KszParameters out;
  out.d = shape.order();
  out.shape = shape;
  out.p = p;
  out.pmax = max_exponent(p);
  out.gamma = ksz_gamma(p);
  out.C_d = ksz_constant(out.d, p);
  const auto t = threshold_R_lambda(shape, p);
  out.R = t.R;
  out.lambda = t.lambda;
  out.bound = ksz_bound(shape, p);
  return out;
}

nlohmann::json to_json(const KszParameters& params) {
  nlohmann::json j;
  j["d"] = params.d;
  j["dims"] = params.shape.dims();
  j["p"] = exponents_to_json(params.p);
  j["pmax"] = params.pmax.is_infinite() ? nlohmann::json("inf") : nlohmann::json(params.pmax.value());
  j["gamma"] = params.gamma;
  j["C_d"] = params.C_d;
  j["R"] = params.R;
  j["lambda"] = params.lambda;
  j["bound"] = params.bound;
  return j;
}

SignTensor sample_signs(const Shape& shape, std::uint64_t seed) {
  std::vector<std::int8_t> signs(shape.size());
  for (std::size_t i = 0; i < signs.size(); ++i) {
    signs[i] = (counter_hash(seed, i) >> 63) ? 1 : -1;
  }
  return SignTensor(shape, std::move(signs));
}

std::string to_string(ThresholdKind kind) {
  return kind == ThresholdKind::kTwoSqrtTwoR ? "2sqrt2_R" : "ksz_bound";
}

nlohmann::json to_json(const SampleCertificate& cert) {
  nlohmann::json j;
  j["tensor"] = sign_tensor_to_json(cert.tensor);
  j["draws"] = cert.draws;
  j["threshold_used"] = to_string(cert.threshold_used);
  j["threshold"] = cert.threshold;
  j["norm_report"] = to_json(cert.norm_report);
  j["seed"] = cert.seed;
  j["draw_seed"] = cert.draw_seed;
  return j;
}

SampleCertificate sample_small_norm_form(const Shape& shape, const PExponents& p,
                                         std::uint64_t seed,
                                         const SampleOptions& options) {
  check_p(shape, p);
  if (!(options.target_fraction > 0.0)) {
    throw InvalidArgument("target fraction must be positive");
  }
  const double two_sqrt2_r = 2.0 * std::sqrt(2.0) * threshold_R_lambda(shape, p).R;
  const double bound = ksz_bound(shape, p);
  const ThresholdKind kind =
      two_sqrt2_r <= bound ? ThresholdKind::kTwoSqrtTwoR : ThresholdKind::kKszBound;
  const double threshold = options.target_fraction * std::min(two_sqrt2_r, bound);

  if (!has_exact_method(shape, p, options.norm.budget)) {
    // Without an exact method the certified upper side is tensor independent.
    double closed_form = upper_bound_l1_chain(shape, p);
    if (std::all_of(p.begin(), p.end(), [](const Exponent& e) { return Exponent(2.0) <= e; })) {
      closed_form = std::min(closed_form, upper_bound_frobenius(SignTensor::ones(shape), p));
    }
    if (closed_form > threshold) {
      throw CertificationUnavailable(
          "no applicable norm method certifies below " + std::to_string(threshold) +
          "; best closed-form upper bound is " + std::to_string(closed_form));
    }
  }

  std::optional<SignTensor> best;
  std::optional<BoundReport> best_report;
  for (std::size_t t = 0; t < options.max_draws; ++t) {
    const std::uint64_t draw_seed = mix_seed(seed, t);
    SignTensor a = sample_signs(shape, draw_seed);
    BoundReport report = norm_bracket(a, p, options.norm);
    if (report.upper <= threshold) {
      SampleCertificate cert;
      cert.tensor = std::move(a);
      cert.draws = t + 1;
      cert.threshold_used = kind;
      cert.threshold = threshold;
      cert.norm_report = std::move(report);
      cert.seed = seed;
      cert.draw_seed = draw_seed;
      return cert;
    }
    if (!best_report || report.upper < best_report->upper) {
      best = std::move(a);
      best_report = std::move(report);
    }
  }
  throw DrawsExhausted("no draw certified below " + std::to_string(threshold) + " in " +
                           std::to_string(options.max_draws) + " draws",
                       std::move(best), std::move(best_report));
}

}  // namespace kszlab
