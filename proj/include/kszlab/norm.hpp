#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "kszlab/exponent.hpp"
#include "kszlab/tensor.hpp"

namespace kszlab {

/// Method tags carried by BoundReport.
namespace method {
inline constexpr const char* kExhaustiveLinf = "exhaustive_linf";
inline constexpr const char* kPowerIterationL2 = "power_iteration_l2";
inline constexpr const char* kDualNorm = "dual_norm";
inline constexpr const char* kAlternatingAscent = "alternating_ascent";
inline constexpr const char* kFrobeniusChain = "frobenius_chain";
inline constexpr const char* kL1Chain = "l1_chain";
}  // namespace method

/// Bracket lower <= ||A|| <= upper. `lower` is A evaluated at `witness`, a
/// point of the product of unit balls; `upper` comes from exhaustion or a
/// closed-form bound.
struct BoundReport {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  PointTuple witness;
  std::string lower_method;
  std::string upper_method;
  bool exact = false;

  double gap() const { return upper - lower; }
};

nlohmann::json to_json(const BoundReport& report);

inline constexpr std::uint64_t kDefaultVertexBudget = std::uint64_t{1} << 24;

/// log2 of the vertex count exact_norm_linf enumerates: sum of all
/// dimensions but the last.
std::size_t linf_enumeration_bits(const Shape& shape);

/// True when the all-infinity exhaustive method fits in `budget` vertices.
bool linf_enumeration_fits(const Shape& shape, std::uint64_t budget);

/// Exact norm on l_inf^{n_1} x ... x l_inf^{n_d}. Enumerates every sign
/// assignment of the first d-1 coordinates (Gray code over the first) and
/// closes the last one with the l_1 norm of its partial coefficients. Ties
/// go to the lexicographically smallest pattern, with + before -, first
/// coordinate first. Throws BudgetExceeded if 2^{n_1+...+n_{d-1}} > budget.
BoundReport exact_norm_linf_report(const SignTensor& a,
                                   std::uint64_t budget = kDefaultVertexBudget,
                                   std::size_t workers = 1);

double exact_norm_linf(const SignTensor& a,
                       std::uint64_t budget = kDefaultVertexBudget,
                       std::size_t workers = 1);

struct SingularTriple {
  double sigma = 0.0;
  std::vector<double> left;   // length n_1, unit l_2 norm
  std::vector<double> right;  // length n_2, unit l_2 norm
  std::size_t iterations = 0;
};

/// Largest singular value of a sign matrix by power iteration on the
/// smaller Gram matrix. Two deterministic starts are run (all-ones and a
/// fixed perturbation of it) and the larger Rayleigh quotient is kept. Each
/// run stops once ||G v - lambda v|| <= tol * lambda. Throws
/// ConvergenceError with the best estimate after `max_iterations`.
SingularTriple top_singular_triple(const SignTensor& a, double tol = 1e-12,
                                   std::size_t max_iterations = 200000);

/// Norm on l_2 x l_2, i.e. sigma_max of the coefficient matrix.
double exact_norm_l2_bilinear(const SignTensor& a, double tol = 1e-12);

struct AscentOptions {
  std::size_t restarts = 20;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::size_t max_sweeps = 10000;
  std::size_t workers = 1;
  bool record_trace = false;
};

struct AscentResult {
  double value = 0.0;
  PointTuple witness;
  std::size_t best_restart = 0;
  /// Objective after every block update, one list per restart; filled only
  /// with record_trace.
  std::vector<std::vector<double>> traces;
};

/// Block-coordinate ascent: each block step replaces x^k by the dual
/// maximizer of its partial coefficients, so the objective never decreases.
/// Restart r starts from points drawn on the l_{p_k} spheres with the stream
/// keyed by mix_seed(seed, r). A restart stops after two consecutive sweeps
/// whose relative gain is below tol. Returns the best restart (ties to the
/// lowest index). A heuristic lower bound, not the norm.
AscentResult alt_max_norm(const SignTensor& a, const PExponents& p,
                          const AscentOptions& options = {});

/// sqrt(prod n_k) * prod n_k^{1/2 - 1/p_k}; requires every p_k >= 2.
double upper_bound_frobenius(const SignTensor& a, const PExponents& p);

/// prod n_k^{1 - 1/p_k}, valid for every p (|A(x)| <= prod ||x^k||_1).
double upper_bound_l1_chain(const Shape& shape, const PExponents& p);

struct NormConfig {
  std::uint64_t budget = kDefaultVertexBudget;
  std::size_t restarts = 20;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// True when norm_bracket returns lower == upper for this shape and p.
bool has_exact_method(const Shape& shape, const PExponents& p,
                      std::uint64_t budget);

/// Best certified bracket: exact when d = 1, when every p_k is infinite and
/// the enumeration fits the budget, or for d = 2 with p = (2, 2); otherwise
/// alternating ascent below and the smallest applicable closed-form bound
/// above.
BoundReport norm_bracket(const SignTensor& a, const PExponents& p,
                         const NormConfig& config = {});

}  // namespace kszlab
