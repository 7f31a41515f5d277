#include "kszlab/hl.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "kszlab/errors.hpp"
#include "kszlab/format.hpp"
#include "kszlab/parallel.hpp"
#include "kszlab/rng.hpp"

namespace kszlab {

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr std::size_t kMaxBlocks = 24;

double snap(double v) { return std::abs(v) <= kBoundaryTol ? 0.0 : v; }

std::vector<std::size_t> subset_of(std::uint64_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; mask >> j; ++j) {
    if ((mask >> j) & 1u) out.push_back(j);
  }
  return out;
}

void check_hypotheses(const PExponents& p, std::size_t d) {
  if (d < 2) throw InvalidArgument("hypothesis d >= 2 violated");
  if (p.size() != d) {
    throw InvalidArgument("expected " + std::to_string(d) + " exponents p, got " +
                          std::to_string(p.size()));
  }
  validate_p_exponents(p);
  const double inv = reciprocal_sum(p);
  if (inv > 0.5 + kBoundaryTol) {
    throw InvalidArgument("hypothesis |1/p| <= 1/2 violated: |1/p| = " + format_double(inv));
  }
}

std::string join_exponents(const PExponents& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ';';
    out += to_string(p[i]);
  }
  return out;
}

}  // namespace

std::size_t BlockExponents::d() const {
  return std::accumulate(blocks.begin(), blocks.end(), std::size_t{0});
}

BlockExponents BlockExponents::trivial(const PExponents& p, std::vector<double> rhos) {
  BlockExponents spec;
  spec.blocks.assign(p.size(), 1);
  for (const auto& e : p) spec.block_p.push_back({e});
  spec.rhos = std::move(rhos);
  validate(spec);
  return spec;
}

BlockExponents BlockExponents::partitioned(std::vector<std::size_t> blocks,
                                           const PExponents& p, std::vector<double> rhos) {
  BlockExponents spec;
  std::size_t start = 0;
  for (auto m : blocks) {
    if (m == 0) throw InvalidArgument("block sizes must be >= 1");
    if (start + m > p.size()) {
      throw InvalidArgument("blocks cover more coordinates than the " +
                            std::to_string(p.size()) + " exponents given");
    }
    spec.block_p.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(start),
                              p.begin() + static_cast<std::ptrdiff_t>(start + m));
    start += m;
  }
  if (start != p.size()) {
    throw InvalidArgument("blocks cover " + std::to_string(start) + " coordinates but " +
                          std::to_string(p.size()) + " exponents were given");
  }
  spec.blocks = std::move(blocks);
  spec.rhos = std::move(rhos);
  validate(spec);
  return spec;
}

void validate(const BlockExponents& spec) {
  if (spec.blocks.empty()) throw InvalidArgument("at least one block is required");
  if (spec.block_p.size() != spec.k() || spec.rhos.size() != spec.k()) {
    throw InvalidArgument("need one exponent tuple and one rho per block (k = " +
                          std::to_string(spec.k()) + ")");
  }
  for (std::size_t j = 0; j < spec.k(); ++j) {
    if (spec.blocks[j] == 0) throw InvalidArgument("block sizes must be >= 1");
    if (spec.block_p[j].size() != spec.blocks[j]) {
      throw InvalidArgument("block " + std::to_string(j) + " has " +
                            std::to_string(spec.blocks[j]) + " coordinates but " +
                            std::to_string(spec.block_p[j].size()) + " exponents");
    }
    for (const auto& e : spec.block_p[j]) {
      if (!e.is_infinite() && !(e.value() > 1.0)) {
        throw InvalidArgument("block exponents must lie in (1, inf], got " + to_string(e));
      }
    }
    if (!(spec.rhos[j] > 0.0) || !std::isfinite(spec.rhos[j])) {
      throw InvalidArgument("rho values must be positive and finite");
    }
  }
}

AdmissibilityVerdict admissible(const BlockExponents& spec) {
  validate(spec);
  const std::size_t k = spec.k();
  if (k > kMaxBlocks) {
    throw InvalidArgument("subset enumeration supports k <= 24, got " + std::to_string(k));
  }
  std::vector<double> block_inv(k);
  for (std::size_t j = 0; j < k; ++j) block_inv[j] = reciprocal_sum(spec.block_p[j]);

  AdmissibilityVerdict verdict;
  verdict.slack = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    double lhs = 0.0;
    double p_part = 0.0;
    std::size_t card = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if ((mask >> j) & 1u) {
        lhs += 1.0 / spec.rhos[j];
        p_part += block_inv[j];
        ++card;
      }
    }
    const double slack = snap((static_cast<double>(card) + 1.0) / 2.0 - p_part - lhs);
    auto subset = subset_of(mask);
    const bool better =
        slack < verdict.slack - kBoundaryTol ||
        (std::abs(slack - verdict.slack) <= kBoundaryTol &&
         (subset.size() < verdict.worst_subset.size() ||
          (subset.size() == verdict.worst_subset.size() && subset < verdict.worst_subset)));
    if (better) {
      verdict.slack = slack;
      verdict.worst_subset = std::move(subset);
    }
  }
  verdict.admissible = verdict.slack >= 0.0;
  return verdict;
}

nlohmann::json to_json(const AdmissibilityVerdict& verdict) {
  nlohmann::json j;
  j["admissible"] = verdict.admissible;
  std::vector<std::size_t> one_based;
  for (auto i : verdict.worst_subset) one_based.push_back(i + 1);
  j["worst_subset"] = one_based;
  j["slack"] = verdict.slack;
  return j;
}

double blow_up_exponent(const std::vector<double>& r, const PExponents& p) {
  check_hypotheses(p, r.size());
  double inv_r = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (!(r[j] >= 1.0 && r[j] <= 2.0)) {
      throw InvalidArgument("hypothesis r in [1,2]^d violated: r[" + std::to_string(j) +
                            "] = " + format_double(r[j]));
    }
    inv_r += 1.0 / r[j];
  }
  const double d = static_cast<double>(r.size());
  return std::max(snap(inv_r - (d + 1.0) / 2.0 + reciprocal_sum(p)), 0.0);
}

std::vector<SubsetBound> s_exponent_lower_bounds(const std::vector<double>& rhos,
                                                 const PExponents& p, std::size_t d) {
  check_hypotheses(p, d);
  if (rhos.size() != d) {
    throw InvalidArgument("expected " + std::to_string(d) + " rho values, got " +
                          std::to_string(rhos.size()));
  }
  if (d > kMaxBlocks) throw InvalidArgument("subset enumeration supports d <= 24");
  for (double rho : rhos) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("rho values must be positive");
  }
  std::vector<SubsetBound> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << d); ++mask) {
    SubsetBound b;
    b.subset = subset_of(mask);
    double inv_rho = 0.0;
    double inv_p = 0.0;
    for (auto j : b.subset) {
      inv_rho += 1.0 / rhos[j];
      inv_p += p[j].reciprocal();
    }
    const double card = static_cast<double>(b.subset.size());
    b.bound = std::max(snap(inv_rho - (card + 1.0) / 2.0 + inv_p), 0.0);
    out.push_back(std::move(b));
  }
  return out;
}

double hl_lhs(const SignTensor& a, const BlockExponents& spec) {
  validate(spec);
  if (spec.d() != a.order()) {
    throw InvalidArgument("blocks cover " + std::to_string(spec.d()) +
                          " coordinates, tensor has order " + std::to_string(a.order()));
  }
  const DenseTensor t = diagonal_block_tensor(a, spec.blocks);
  return mixed_norm(t, MixedNormSpec{spec.rhos, spec.blocks});
}

std::vector<SweepRow> growth_witness_sweep(std::size_t d, const PExponents& p,
                                           const std::vector<double>& rhos,
                                           const std::vector<std::size_t>& n_list,
                                           const SweepOptions& options) {
  if (d == 0) throw InvalidArgument("d must be >= 1");
  if (p.size() != d) {
    throw InvalidArgument("expected " + std::to_string(d) + " exponents p, got " +
                          std::to_string(p.size()));
  }
  if (options.trials == 0) throw InvalidArgument("trials must be >= 1");
  if (n_list.empty()) throw InvalidArgument("at least one n is required");
  const BlockExponents spec = BlockExponents::trivial(p, rhos);

  SampleOptions sample = options.sample;
  sample.norm.workers = 1;
  const std::size_t tasks = n_list.size() * options.trials;
  std::vector<SweepRow> rows(tasks);
  parallel_for(tasks, options.workers, [&](std::size_t task) {
    const std::size_t ni = task / options.trials;
    const std::size_t trial = task % options.trials;
    const Shape shape(std::vector<std::size_t>(d, n_list[ni]));
    const std::uint64_t seed = mix_seed(mix_seed(options.seed, ni), trial);
    const auto cert = sample_small_norm_form(shape, p, seed, sample);
    SweepRow& row = rows[task];
    row.d = d;
    row.n = n_list[ni];
    row.trial = trial;
    row.rhos = rhos;
    row.p = p;
    row.hl_lhs = hl_lhs(cert.tensor, spec);
    row.ksz_bound = ksz_bound(shape, p);
    row.ratio = row.hl_lhs / row.ksz_bound;
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "d,n,rho_list,p_list,hl_lhs,ksz_bound,ratio\n";
  for (const auto& row : rows) {
    out += std::to_string(row.d) + ',' + std::to_string(row.n) + ',' +
           join_doubles(row.rhos, ";") + ',' + join_exponents(row.p) + ',' +
           format_double(row.hl_lhs) + ',' + format_double(row.ksz_bound) + ',' +
           format_double(row.ratio) + '\n';
  }
  return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("slope fit needs at least two (x, y) pairs");
  }
  const double count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("log-log fit needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw InvalidArgument("slope fit needs at least two distinct x values");
  return sxy / sxx;
}

double sweep_slope(const std::vector<SweepRow>& rows) {
  std::vector<double> x, y;
  for (const auto& row : rows) {
    x.push_back(static_cast<double>(row.n));
    y.push_back(row.ratio);
  }
  return fit_loglog_slope(x, y);
}

}  // namespace kszlab
