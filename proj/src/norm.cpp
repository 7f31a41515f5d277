#include "kszlab/norm.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "kszlab/errors.hpp"
#include "kszlab/parallel.hpp"
#include "kszlab/rng.hpp"
#include "kszlab/serialization.hpp"

namespace kszlab {

namespace {

void check_p(const Shape& shape, const PExponents& p) {
  if (p.size() != shape.order()) {
    throw InvalidArgument("expected " + std::to_string(shape.order()) +
                          " exponents, got " + std::to_string(p.size()));
  }
  validate_p_exponents(p);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Candidate {
  double value = -1.0;
  std::uint64_t pattern = 0;

  void offer(double v, std::uint64_t pat) {
    if (v > value || (v == value && pat < pattern)) {
      value = v;
      pattern = pat;
    }
  }
};

// Rows of the (n_first x n_last) matrix left after contracting the middle
// coordinates with sign vectors.
std::vector<double> contract_middle(const SignTensor& a, const PointTuple& mid) {
  const Shape& shape = a.shape();
  const std::size_t d = shape.order();
  const std::size_t n_last = shape.dim(d - 1);
  std::vector<double> m(shape.dim(0) * n_last, 0.0);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t flat = 0; flat < a.size(); ++flat) {
    double w = a[flat];
    for (std::size_t k = 1; k + 1 < d; ++k) w *= mid[k][idx[k]];
    m[idx[0] * n_last + idx[d - 1]] += w;
    for (std::size_t k = d; k-- > 0;) {
      if (++idx[k] < shape.dim(k)) break;
      idx[k] = 0;
    }
  }
  return m;
}

struct PowerRun {
  double lambda = 0.0;
  std::vector<double> v;
  std::size_t iterations = 0;
  bool converged = false;
};

PowerRun power_iterate(const std::vector<double>& gram, std::size_t n,
                       std::vector<double> v, double tol,
                       std::size_t max_iterations) {
  PowerRun run;
  const double norm0 = l2(v);
  for (auto& x : v) x /= norm0;
  std::vector<double> w(n);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = dot(std::span<const double>(gram).subspan(i * n, n), v);
    }
    const double lambda = dot(v, w);
    const double wn = l2(w);
    run.iterations = it + 1;
    run.lambda = lambda;
    run.v = v;
    if (wn == 0.0) return run;  // start lies in the null space
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
    if (std::sqrt(r2) <= tol * lambda) {
      run.converged = true;
      return run;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
  }
  return run;
}

std::vector<double> draw_sphere_point(CounterRng& rng, std::size_t n, Exponent p) {
  std::vector<double> x(n);
  if (p.is_infinite()) {
    for (auto& xi : x) xi = 2.0 * rng.uniform() - 1.0;
  } else {
    // |x_i| ~ Gamma(1/p)^{1/p} gives density proportional to exp(-|t|^p).
    std::gamma_distribution<double> gamma(1.0 / p.value(), 1.0);
    for (auto& xi : x) {
      const double mag = std::pow(gamma(rng), 1.0 / p.value());
      xi = (rng() >> 63) ? -mag : mag;
    }
  }
  const double norm = lp_norm(x, p);
  if (norm == 0.0) {
    x.assign(n, 0.0);
    x[0] = 1.0;
    return x;
  }
  for (auto& xi : x) xi /= norm;
  return x;
}

struct RestartOutcome {
  double value = 0.0;
  PointTuple point;
  std::vector<double> trace;
};

RestartOutcome run_restart(const SignTensor& a, const PExponents& p,
                           const AscentOptions& options, std::size_t restart) {
  constexpr std::size_t kMaxRedraws = 8;
  const std::size_t d = a.order();
  CounterRng rng(mix_seed(options.seed, restart));
  RestartOutcome out;
  auto draw_all = [&] {
    out.point.assign(d, {});
    for (std::size_t k = 0; k < d; ++k) out.point[k] = draw_sphere_point(rng, a.shape().dim(k), p[k]);
  };
  draw_all();

  double objective = -std::numeric_limits<double>::infinity();
  std::size_t redraws = 0;
  std::size_t stagnant = 0;
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    const double before = objective;
    bool degenerate = false;
    for (std::size_t k = 0; k < d; ++k) {
      const auto c = partial_coefficients(a, out.point, k);
      auto step = dual_maximizer(c, p[k]);
      if (step.value == 0.0) {
        degenerate = true;
        out.point[k] = std::move(step.point);
        break;
      }
      const double slack = 1e-12 * std::max(1.0, std::abs(objective));
      if (step.value < objective - slack) {
        throw Error("alternating ascent objective decreased from " +
                    std::to_string(objective) + " to " + std::to_string(step.value));
      }
      out.point[k] = std::move(step.point);
      objective = step.value;
      if (options.record_trace) out.trace.push_back(objective);
    }
    if (degenerate) {
      if (++redraws > kMaxRedraws) {
        objective = 0.0;
        break;
      }
      draw_all();
      objective = -std::numeric_limits<double>::infinity();
      stagnant = 0;
      out.trace.clear();
      continue;
    }
    if (std::isfinite(before)) {
      const double gain = (objective - before) / std::max(objective, 1e-300);
      stagnant = gain < options.tol ? stagnant + 1 : 0;
      if (stagnant >= 2) break;
    }
  }
  out.value = objective;
  return out;
}

}  // namespace

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json j;
  j["lower"] = report.lower;
  j["upper"] = report.upper;
  j["lower_method"] = report.lower_method;
  j["upper_method"] = report.upper_method;
  j["witness"] = point_tuple_to_json(report.witness);
  return j;
}

std::size_t linf_enumeration_bits(const Shape& shape) {
  return shape.dim_sum() - shape.dim(shape.order() - 1);
}

bool linf_enumeration_fits(const Shape& shape, std::uint64_t budget) {
  const std::size_t bits = linf_enumeration_bits(shape);
  return bits <= 62 && (std::uint64_t{1} << bits) <= budget;
}

BoundReport exact_norm_linf_report(const SignTensor& a, std::uint64_t budget,
                                   std::size_t workers) {
  const Shape& shape = a.shape();
  const std::size_t d = shape.order();
  BoundReport report;
  report.lower_method = report.upper_method = method::kExhaustiveLinf;
  report.exact = true;
  if (d == 1) {
    auto best = dual_maximizer(a.as_doubles(), Exponent::infinity());
    report.lower = report.upper = best.value;
    report.witness = {std::move(best.point)};
    return report;
  }
  const std::size_t bits = linf_enumeration_bits(shape);
  if (!linf_enumeration_fits(shape, budget)) {
    throw BudgetExceeded("exhaustive l_inf norm needs 2^" + std::to_string(bits) +
                             " vertices, budget is " + std::to_string(budget),
                         static_cast<double>(bits));
  }

  const std::size_t n_first = shape.dim(0);
  const std::size_t n_last = shape.dim(d - 1);
  const std::size_t mid_bits = bits - n_first;
  // Split a few leading bits of the first coordinate into work items when
  // the middle coordinates alone give too few.
  const std::size_t prefix_bits = std::min(n_first, mid_bits >= 6 ? 0 : 6 - mid_bits);
  const std::size_t suffix_bits = n_first - prefix_bits;
  const std::uint64_t chunks = std::uint64_t{1} << mid_bits;

  auto sign_of = [](std::uint64_t mask, std::size_t pos) {
    return ((mask >> pos) & 1u) ? -1.0 : 1.0;
  };
  auto mid_point = [&](std::uint64_t mid) {
    PointTuple x(d);
    std::size_t t = 0;
    for (std::size_t k = 1; k + 1 < d; ++k) {
      x[k].resize(shape.dim(k));
      for (auto& xi : x[k]) xi = sign_of(mid, mid_bits - 1 - t++);
    }
    return x;
  };

  std::vector<Candidate> best(chunks);
  parallel_for(chunks, workers, [&](std::size_t mid) {
    const auto m = contract_middle(a, mid_point(mid));
    std::vector<double> x0(n_first);
    std::vector<double> c(n_last);
    Candidate& cand = best[mid];
    auto offer = [&](std::uint64_t first_mask) {
      double v = 0.0;
      for (double ci : c) v += std::abs(ci);
      cand.offer(v, (first_mask << mid_bits) | mid);
    };
    for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << prefix_bits); ++prefix) {
      for (std::size_t i = 0; i < n_first; ++i) {
        x0[i] = i < prefix_bits ? sign_of(prefix, prefix_bits - 1 - i) : 1.0;
      }
      std::uint64_t mask = prefix << suffix_bits;
      for (std::size_t l = 0; l < n_last; ++l) {
        double s = 0.0;
        for (std::size_t i = 0; i < n_first; ++i) s += x0[i] * m[i * n_last + l];
        c[l] = s;
      }
      offer(mask);
      for (std::uint64_t step = 1; step < (std::uint64_t{1} << suffix_bits); ++step) {
        const std::size_t j = static_cast<std::size_t>(std::countr_zero(step));
        const std::size_t i = n_first - 1 - j;
        for (std::size_t l = 0; l < n_last; ++l) c[l] -= 2.0 * x0[i] * m[i * n_last + l];
        x0[i] = -x0[i];
        mask ^= std::uint64_t{1} << j;
        offer(mask);
      }
    }
  });

  Candidate winner;
  for (const auto& cand : best) winner.offer(cand.value, cand.pattern);

  PointTuple x = mid_point(winner.pattern & ((std::uint64_t{1} << mid_bits) - 1));
  const std::uint64_t first_mask = winner.pattern >> mid_bits;
  x[0].resize(n_first);
  for (std::size_t i = 0; i < n_first; ++i) x[0][i] = sign_of(first_mask, n_first - 1 - i);
  x[d - 1] = dual_maximizer(partial_coefficients(a, x, d - 1), Exponent::infinity()).point;
  report.lower = report.upper = winner.value;
  report.witness = std::move(x);
  return report;
}

double exact_norm_linf(const SignTensor& a, std::uint64_t budget, std::size_t workers) {
  return exact_norm_linf_report(a, budget, workers).lower;
}

SingularTriple top_singular_triple(const SignTensor& a, double tol,
                                   std::size_t max_iterations) {
  if (a.order() != 2) throw InvalidArgument("singular values need an order-2 tensor");
  const std::size_t rows = a.shape().dim(0);
  const std::size_t cols = a.shape().dim(1);
  const bool right_side = cols <= rows;
  const std::size_t n = right_side ? cols : rows;
  const std::size_t other = right_side ? rows : cols;
  auto entry = [&](std::size_t i, std::size_t j) -> double {
    return right_side ? a[j * cols + i] : a[i * cols + j];
  };
  // Gram entries are integers, so G is exact.
  std::vector<double> gram(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < other; ++t) s += entry(i, t) * entry(j, t);
      gram[i * n + j] = s;
    }
  }

  std::vector<double> ones(n, 1.0);
  std::vector<double> perturbed(n);
  for (std::size_t i = 0; i < n; ++i) {
    perturbed[i] = 1.0 + 0.5 * CounterRng(0x5eedULL, i).uniform();
  }
  PowerRun first = power_iterate(gram, n, ones, tol, max_iterations);
  PowerRun second = power_iterate(gram, n, perturbed, tol, max_iterations);
  PowerRun& run = second.lambda > first.lambda ? second : first;
  if (!run.converged) {
    throw ConvergenceError("power iteration did not converge in " +
                               std::to_string(max_iterations) + " iterations",
                           std::sqrt(std::max(run.lambda, 0.0)));
  }

  std::vector<double> image(other, 0.0);
  for (std::size_t t = 0; t < other; ++t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += entry(i, t) * run.v[i];
    image[t] = s;
  }
  SingularTriple out;
  out.sigma = l2(image);
  for (auto& x : image) x /= out.sigma;
  out.iterations = first.iterations + second.iterations;
  if (right_side) {
    out.right = std::move(run.v);
    out.left = std::move(image);
  } else {
    out.left = std::move(run.v);
    out.right = std::move(image);
  }
  return out;
}

double exact_norm_l2_bilinear(const SignTensor& a, double tol) {
  return top_singular_triple(a, tol).sigma;
}

AscentResult alt_max_norm(const SignTensor& a, const PExponents& p,
                          const AscentOptions& options) {
  check_p(a.shape(), p);
  if (options.restarts == 0) throw InvalidArgument("restarts must be >= 1");
  if (!(options.tol > 0.0)) throw InvalidArgument("tol must be positive");

  std::vector<RestartOutcome> outcomes(options.restarts);
  parallel_for(options.restarts, options.workers, [&](std::size_t r) {
    outcomes[r] = run_restart(a, p, options, r);
  });

  AscentResult result;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    if (r == 0 || outcomes[r].value > result.value) {
      result.value = outcomes[r].value;
      result.best_restart = r;
    }
  }
  result.witness = outcomes[result.best_restart].point;
  if (options.record_trace) {
    for (auto& o : outcomes) result.traces.push_back(std::move(o.trace));
  }
  return result;
}

double upper_bound_frobenius(const SignTensor& a, const PExponents& p) {
  const Shape& shape = a.shape();
  check_p(shape, p);
  double bound = std::sqrt(static_cast<double>(shape.size()));
  for (std::size_t k = 0; k < shape.order(); ++k) {
    if (p[k] < Exponent(2.0)) {
      throw InvalidArgument("Frobenius chain needs p >= 2, but p[" + std::to_string(k) +
                            "] = " + to_string(p[k]));
    }
    bound *= std::pow(static_cast<double>(shape.dim(k)), 0.5 - p[k].reciprocal());
  }
  return bound;
}

double upper_bound_l1_chain(const Shape& shape, const PExponents& p) {
  check_p(shape, p);
  double bound = 1.0;
  for (std::size_t k = 0; k < shape.order(); ++k) {
    bound *= std::pow(static_cast<double>(shape.dim(k)), 1.0 - p[k].reciprocal());
  }
  return bound;
}

namespace {

bool all_infinite(const PExponents& p) {
  for (const auto& e : p) {
    if (!e.is_infinite()) return false;
  }
  return true;
}

bool is_l2_bilinear(const PExponents& p) {
  return p.size() == 2 && p[0] == Exponent(2.0) && p[1] == Exponent(2.0);
}

}  // namespace

bool has_exact_method(const Shape& shape, const PExponents& p, std::uint64_t budget) {
  return shape.order() == 1 || (all_infinite(p) && linf_enumeration_fits(shape, budget)) ||
         is_l2_bilinear(p);
}

BoundReport norm_bracket(const SignTensor& a, const PExponents& p,
                         const NormConfig& config) {
  const Shape& shape = a.shape();
  check_p(shape, p);

  if (shape.order() == 1) {
    auto best = dual_maximizer(a.as_doubles(), p[0]);
    BoundReport report;
    report.lower = report.upper = best.value;
    report.witness = {std::move(best.point)};
    report.lower_method = report.upper_method = method::kDualNorm;
    report.exact = true;
    return report;
  }
  if (all_infinite(p) && linf_enumeration_fits(shape, config.budget)) {
    return exact_norm_linf_report(a, config.budget, config.workers);
  }
  if (is_l2_bilinear(p)) {
    auto triple = top_singular_triple(a, std::min(config.tol, 1e-12));
    BoundReport report;
    report.lower = report.upper = triple.sigma;
    report.witness = {std::move(triple.left), std::move(triple.right)};
    report.lower_method = report.upper_method = method::kPowerIterationL2;
    report.exact = true;
    return report;
  }

  AscentOptions options;
  options.restarts = config.restarts;
  options.tol = config.tol;
  options.seed = config.seed;
  options.workers = config.workers;
  auto ascent = alt_max_norm(a, p, options);

  BoundReport report;
  report.lower = ascent.value;
  report.witness = std::move(ascent.witness);
  report.lower_method = method::kAlternatingAscent;
  report.upper = upper_bound_l1_chain(shape, p);
  report.upper_method = method::kL1Chain;
  bool all_at_least_two = true;
  for (const auto& e : p) all_at_least_two = all_at_least_two && Exponent(2.0) <= e;
  if (all_at_least_two) {
    const double frob = upper_bound_frobenius(a, p);
    if (frob < report.upper) {
      report.upper = frob;
      report.upper_method = method::kFrobeniusChain;
    }
  }
  if (report.lower > report.upper * (1.0 + 1e-9)) {
    throw Error("norm bracket inverted: lower " + std::to_string(report.lower) +
                " > upper " + std::to_string(report.upper));
  }
  return report;
}

}  // namespace kszlab
