#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "kszlab/errors.hpp"
#include "kszlab/exponent.hpp"
#include "kszlab/norm.hpp"
#include "kszlab/tensor.hpp"

// Logarithms in this module are natural logarithms.

namespace kszlab {

/// C_d = 8 (d!)^{1 - max(1/2, 1/p)} sqrt(log(1 + 4d)), p = max_k p_k.
double ksz_constant(std::size_t d, const PExponents& p);

/// gamma = min{2, max{p_k : p_k <= 2}}; 2 when no p_k is <= 2.
double ksz_gamma(const PExponents& p);

/// C_d^{2(1-1/gamma)} (sum n_k)^{1-1/gamma} prod n_k^{max(1/gamma - 1/p_k, 0)}.
double ksz_bound(const Shape& shape, const PExponents& p);

/// The gamma = 2 form C_d prod n_k^{max(1/2 - 1/p_k, 0)} (sum n_k)^{1/2},
/// evaluated independently of ksz_bound.
double ksz_bound_gamma2(const Shape& shape, const PExponents& p);

struct Threshold {
  double R = 0.0;
  double lambda = 0.0;
  /// (d!)^{2(1-1/m(p))} prod n_k^{2(1/2 - 1/M(p_k))}, the variance proxy that
  /// divides R in lambda.
  double denominator = 0.0;
};

/// R = (2 D log(8 (1+4d)^{2 sum n_k}))^{1/2} and lambda = R / D, where D is
/// Threshold::denominator, m(t) = min(t, 2), M(t) = max(t, 2) and
/// p = max_k p_k. The log is expanded as log 8 + 2 (sum n_k) log(1 + 4d).
Threshold threshold_R_lambda(const Shape& shape, const PExponents& p);

/// Log of the covering bound (1 + 2/r)^{2n}: 2n log(1 + 2/r).
double covering_count(double r, std::size_t n);

/// sqrt(2) max(log 4xi, 2 (sum n_k) log(1 + 4d))^{1/2}; needs xi > 1.
double xi_constant(double xi, std::size_t d, const Shape& shape);

struct KszParameters {
  std::size_t d = 0;
  Shape shape;
  PExponents p;
  Exponent pmax;
  double gamma = 2.0;
  double C_d = 0.0;
  double R = 0.0;
  double lambda = 0.0;
  double bound = 0.0;
};

KszParameters ksz_parameters(const Shape& shape, const PExponents& p);
nlohmann::json to_json(const KszParameters& params);

/// IID uniform signs; entry at flat index i is +1 when the top bit of
/// counter_hash(seed, i) is set. Any slice can be regenerated on its own.
SignTensor sample_signs(const Shape& shape, std::uint64_t seed);

enum class ThresholdKind { kTwoSqrtTwoR, kKszBound };
std::string to_string(ThresholdKind kind);

struct SampleCertificate {
  SignTensor tensor;
  std::size_t draws = 0;
  ThresholdKind threshold_used = ThresholdKind::kTwoSqrtTwoR;
  double threshold = 0.0;
  BoundReport norm_report;
  std::uint64_t seed = 0;       // base seed
  std::uint64_t draw_seed = 0;  // seed of the accepted draw
};

nlohmann::json to_json(const SampleCertificate& cert);

struct SampleOptions {
  std::size_t max_draws = 64;
  NormConfig norm;
  /// Certify below target_fraction * min(2 sqrt(2) R, ksz_bound).
  double target_fraction = 1.0;
};

/// No norm method can reach the threshold for this shape and p.
class CertificationUnavailable : public Error {
public:
  using Error::Error;
};

/// Every draw failed to certify.
class DrawsExhausted : public Error {
public:
  DrawsExhausted(const std::string& what, std::optional<SignTensor> best,
                 std::optional<BoundReport> report)
      : Error(what), best_(std::move(best)), report_(std::move(report)) {}

  const std::optional<SignTensor>& best_tensor() const { return best_; }
  const std::optional<BoundReport>& best_report() const { return report_; }

private:
  std::optional<SignTensor> best_;
  std::optional<BoundReport> report_;
};

/// Draw t uses sample_signs(shape, mix_seed(seed, t)); returns the first
/// draw whose certified upper norm bound is at most the threshold.
SampleCertificate sample_small_norm_form(const Shape& shape, const PExponents& p,
                                         std::uint64_t seed,
                                         const SampleOptions& options = {});

}  // namespace kszlab
