#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kszlab/exponent.hpp"
#include "kszlab/ksz.hpp"
#include "kszlab/tensor.hpp"

namespace kszlab {

/// Block partition (m_1, ..., m_k) of the d coordinates, the exponents p^j
/// of each block and one mixed-norm exponent rho_j per block.
struct BlockExponents {
  std::vector<std::size_t> blocks;
  std::vector<PExponents> block_p;
  std::vector<double> rhos;

  std::size_t k() const { return blocks.size(); }
  std::size_t d() const;

  /// Every block of size one.
  static BlockExponents trivial(const PExponents& p, std::vector<double> rhos);

  /// Splits the flat p list into consecutive blocks.
  static BlockExponents partitioned(std::vector<std::size_t> blocks, const PExponents& p,
                                    std::vector<double> rhos);
};

/// Throws InvalidArgument unless the blocks sum to d, every p entry lies in
/// (1, inf] and every rho is positive.
void validate(const BlockExponents& spec);

struct AdmissibilityVerdict {
  bool admissible = false;
  std::vector<std::size_t> worst_subset;  // zero-based, sorted
  double slack = 0.0;
};

/// Checks sum_{j in I} 1/rho_j <= (|I| + 1)/2 - sum_{j in I} |1/p^j| on every
/// nonempty I (bitmask enumeration, k <= 24). Slack is RHS - LHS at the
/// worst subset; ties go to the smaller subset, then the lexicographically
/// smaller one. Slacks within 1e-12 of zero count as zero, so boundary
/// exponents are admissible.
AdmissibilityVerdict admissible(const BlockExponents& spec);

/// worst_subset is written one-based.
nlohmann::json to_json(const AdmissibilityVerdict& verdict);

/// max{|1/r| - (d+1)/2 + |1/p|, 0}; needs d >= 2, |1/p| <= 1/2, r in [1,2]^d.
double blow_up_exponent(const std::vector<double>& r, const PExponents& p);

struct SubsetBound {
  std::vector<std::size_t> subset;  // zero-based, sorted
  double bound = 0.0;
};

/// For every nonempty I: max{0, sum_I 1/rho_j - (|I|+1)/2 + sum_I 1/p_j},
/// the least admissible value of sum_I s_j. Ordered by bitmask.
std::vector<SubsetBound> s_exponent_lower_bounds(const std::vector<double>& rhos,
                                                 const PExponents& p, std::size_t d);

/// Mixed norm of the block-diagonal restriction of A.
double hl_lhs(const SignTensor& a, const BlockExponents& spec);

struct SweepRow {
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t trial = 0;
  std::vector<double> rhos;
  PExponents p;
  double hl_lhs = 0.0;
  double ksz_bound = 0.0;
  double ratio = 0.0;
};

struct SweepOptions {
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  SampleOptions sample;
  std::size_t workers = 1;
};

/// For each n, certifies `trials` forms on (l_{p_1}^n, ..., l_{p_d}^n) with
/// sample_small_norm_form and records hl_lhs / ksz_bound. Rows are ordered by
/// (n index, trial).
std::vector<SweepRow> growth_witness_sweep(std::size_t d, const PExponents& p,
                                           const std::vector<double>& rhos,
                                           const std::vector<std::size_t>& n_list,
                                           const SweepOptions& options = {});

/// Header d,n,rho_list,p_list,hl_lhs,ksz_bound,ratio; lists are
/// ';'-separated inside their field.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// fit_loglog_slope over (n, ratio) of every row.
double sweep_slope(const std::vector<SweepRow>& rows);

}  // namespace kszlab
