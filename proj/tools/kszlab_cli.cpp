// Command-line front end for the kszlab library.
//
// Exit codes: 0 success, 1 a proved lower bound was violated (or an
// internal failure), 2 usage or domain error, 3 budget, draw or iteration
// exhaustion.

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kszlab/bounds.hpp"
#include "kszlab/errors.hpp"
#include "kszlab/format.hpp"
#include "kszlab/hl.hpp"
#include "kszlab/ksz.hpp"
#include "kszlab/norm.hpp"
#include "kszlab/serialization.hpp"

namespace {

using namespace kszlab;

constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitExhausted = 3;

struct RunConfig {
  std::optional<std::size_t> d;
  std::string dims;
  std::string p;
  std::string rho;
  std::string blocks;
  std::string tensor_path;
  std::uint64_t seed = 0;
  std::size_t trials = 100;
  std::uint64_t budget = kDefaultVertexBudget;
  std::size_t restarts = 20;
  double tol = 1e-10;
  std::size_t workers = 1;
  std::size_t max_draws = 64;
  double target_fraction = 1.0;
  double xi = 2.0;
  bool exhaustive = false;
  std::string output;
  std::string format;
};

std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.empty() || v < 1) {
      throw InvalidArgument(std::string(what) + " entries must be positive integers, got '" +
                            item + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw InvalidArgument(std::string(what) + " must not be empty");
  return out;
}

std::vector<double> parse_rho_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& e : parse_exponent_list(text)) {
    if (e.is_infinite()) throw InvalidArgument("rho values must be finite");
    out.push_back(e.value());
  }
  return out;
}

PExponents parse_p(const RunConfig& cfg) {
  auto p = parse_exponent_list(cfg.p);
  validate_p_exponents(p);
  return p;
}

void check_d(const RunConfig& cfg, std::size_t actual, const char* source) {
  if (cfg.d && *cfg.d != actual) {
    throw InvalidArgument("-d " + std::to_string(*cfg.d) + " does not match the " +
                          std::to_string(actual) + " entries of " + source);
  }
}

NormConfig norm_config(const RunConfig& cfg) {
  NormConfig norm;
  norm.budget = cfg.budget;
  norm.restarts = cfg.restarts;
  norm.tol = cfg.tol;
  norm.seed = cfg.seed;
  norm.workers = cfg.workers;
  return norm;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open output file '" + cfg.output + "'");
  out << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

int cmd_constants(const RunConfig& cfg) {
  const Shape shape(parse_size_list(cfg.dims, "-n"));
  const PExponents p = parse_p(cfg);
  check_d(cfg, shape.order(), "-n");
  check_d(cfg, p.size(), "-p");
  nlohmann::json j = to_json(ksz_parameters(shape, p));
  j["two_sqrt2_R"] = 2.0 * std::sqrt(2.0) * j["R"].get<double>();
  j["xi"] = cfg.xi;
  j["xi_constant"] = xi_constant(cfg.xi, shape.order(), shape);
  emit(cfg, dump(j));
  return 0;
}

int cmd_sample(const RunConfig& cfg) {
  const Shape shape(parse_size_list(cfg.dims, "-n"));
  const PExponents p = parse_p(cfg);
  check_d(cfg, shape.order(), "-n");
  SampleOptions options;
  options.max_draws = cfg.max_draws;
  options.norm = norm_config(cfg);
  options.target_fraction = cfg.target_fraction;
  const auto cert = sample_small_norm_form(shape, p, cfg.seed, options);
  emit(cfg, dump(to_json(cert)));
  return 0;
}

SignTensor load_or_sample(const RunConfig& cfg) {
  if (!cfg.tensor_path.empty()) {
    std::ifstream in(cfg.tensor_path);
    if (!in) throw InvalidArgument("cannot open tensor file '" + cfg.tensor_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument("tensor file is not valid JSON: " + std::string(e.what()));
    }
    return sign_tensor_from_json(j);
  }
  if (cfg.dims.empty()) throw InvalidArgument("either --tensor or -n is required");
  return sample_signs(Shape(parse_size_list(cfg.dims, "-n")), cfg.seed);
}

int cmd_norm(const RunConfig& cfg) {
  const SignTensor a = load_or_sample(cfg);
  const PExponents p = parse_p(cfg);
  check_d(cfg, a.order(), "the tensor shape");
  nlohmann::json j = to_json(norm_bracket(a, p, norm_config(cfg)));
  emit(cfg, dump(j));
  return 0;
}

int cmd_window(const RunConfig& cfg) {
  const Shape shape(parse_size_list(cfg.dims, "-n"));
  const PExponents p = parse_p(cfg);
  check_d(cfg, shape.order(), "-n");
  WindowOptions options;
  options.trials = cfg.trials;
  options.seed = cfg.seed;
  options.exhaustive = cfg.exhaustive;
  options.norm = norm_config(cfg);
  options.workers = cfg.workers;
  const auto report = window_experiment(shape, p, options);
  emit(cfg, cfg.format == "json" ? dump(window_summary_json(report)) : window_csv(report));
  if (report.under_sampled) {
    std::cerr << "warning: min ratio " << format_double(report.min_ratio)
              << " exceeds the sampled construction's constant "
              << format_double(report.upper_const) << "; more trials may be needed\n";
  }
  if (report.violated) {
    std::cerr << "error: a norm fell below the proved lower bound\n";
    return kExitViolation;
  }
  return 0;
}

int cmd_hl(const RunConfig& cfg) {
  const PExponents p = parse_exponent_list(cfg.p);
  const std::vector<double> rhos = parse_rho_list(cfg.rho);
  check_d(cfg, p.size(), "-p");
  const bool trivial = cfg.blocks.empty();
  const BlockExponents spec =
      trivial ? BlockExponents::trivial(p, rhos)
              : BlockExponents::partitioned(parse_size_list(cfg.blocks, "--blocks"), p, rhos);

  nlohmann::json j;
  j["verdict"] = to_json(admissible(spec));
  j["blow_up_exponent"] = nullptr;
  j["s_lower_bounds"] = nullptr;
  if (trivial) {
    try {
      j["blow_up_exponent"] = blow_up_exponent(rhos, p);
    } catch (const InvalidArgument& e) {
      j["blow_up_note"] = e.what();
    }
    try {
      nlohmann::json bounds = nlohmann::json::array();
      for (const auto& b : s_exponent_lower_bounds(rhos, p, p.size())) {
        std::vector<std::size_t> one_based;
        for (auto i : b.subset) one_based.push_back(i + 1);
        bounds.push_back({{"subset", one_based}, {"bound", b.bound}});
      }
      j["s_lower_bounds"] = bounds;
    } catch (const InvalidArgument& e) {
      j["s_lower_bounds_note"] = e.what();
    }
  }
  if (!cfg.dims.empty() || !cfg.tensor_path.empty()) {
    const SignTensor a = load_or_sample(cfg);
    j["hl_lhs"] = hl_lhs(a, spec);
  }
  emit(cfg, dump(j));
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const PExponents p = parse_p(cfg);
  const std::size_t d = cfg.d.value_or(p.size());
  check_d(cfg, p.size(), "-p");
  const std::vector<double> rhos = parse_rho_list(cfg.rho);
  const auto n_list = parse_size_list(cfg.dims, "-n");
  SweepOptions options;
  options.trials = cfg.trials;
  options.seed = cfg.seed;
  options.sample.max_draws = cfg.max_draws;
  options.sample.norm = norm_config(cfg);
  options.sample.target_fraction = cfg.target_fraction;
  options.workers = cfg.workers;
  const auto rows = growth_witness_sweep(d, p, rhos, n_list, options);
  if (cfg.format == "json") {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"n", r.n}, {"trial", r.trial}, {"hl_lhs", r.hl_lhs},
                           {"ksz_bound", r.ksz_bound}, {"ratio", r.ratio}});
    }
    j["slope"] = n_list.size() > 1 ? nlohmann::json(sweep_slope(rows)) : nlohmann::json(nullptr);
    try {
      j["blow_up_exponent"] = blow_up_exponent(rhos, p);
    } catch (const InvalidArgument&) {
      j["blow_up_exponent"] = nullptr;
    }
    emit(cfg, dump(j));
  } else {
    emit(cfg, sweep_csv(rows));
  }
  return 0;
}

void add_norm_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--budget", cfg.budget, "Vertex budget for exhaustive enumeration")
      ->capture_default_str();
  cmd->add_option("--restarts", cfg.restarts, "Alternating-ascent restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--tol", cfg.tol, "Relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_common_flags(CLI::App* cmd, RunConfig& cfg, bool with_format) {
  cmd->add_option("--seed", cfg.seed, "64-bit seed")->capture_default_str();
  cmd->add_option("--workers", cfg.workers, "Worker threads (output does not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("-o,--output", cfg.output, "Write output to this file instead of stdout");
  if (with_format) {
    cmd->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random unimodular multilinear forms, their norms and Hardy-Littlewood exponents"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::function<int(const RunConfig&)> handler;

  auto* constants = app.add_subcommand("constants", "Print the sampling constants for a shape");
  constants->footer(
      "Evaluates (natural log):\n"
      "  C_d    = 8 (d!)^{1-max(1/2,1/p)} sqrt(log(1+4d)),  p = max p_k\n"
      "  gamma  = min{2, max{p_k : p_k <= 2}}\n"
      "  bound  = C_d^{2(1-1/gamma)} (sum n_k)^{1-1/gamma} prod n_k^{max(1/gamma-1/p_k,0)}\n"
      "  R      = (2 D log(8 (1+4d)^{2 sum n_k}))^{1/2},  lambda = R / D,\n"
      "           D = (d!)^{2(1-1/min(p,2))} prod n_k^{2(1/2-1/max(p_k,2))}\n"
      "  C(xi)  = sqrt(2) max(log 4xi, 2 (sum n_k) log(1+4d))^{1/2}");
  constants->add_option("-d", cfg.d, "Degree d (checked against -n and -p)");
  constants->add_option("-n", cfg.dims, "Dimensions n_1,...,n_d")->required();
  constants->add_option("-p", cfg.p, "Exponents p_1,...,p_d (decimal, a/b or inf)")->required();
  constants->add_option("--xi", cfg.xi, "Failure-probability parameter xi > 1")->capture_default_str();
  constants->add_option("-o,--output", cfg.output, "Write output to this file instead of stdout");
  constants->callback([&] { handler = cmd_constants; });

  auto* sample = app.add_subcommand("sample", "Draw a sign tensor with a certified small norm");
  sample->footer(
      "Draw t uses seed mix(seed, t); accepts the first draw whose certified upper\n"
      "norm bound is <= min(2 sqrt(2) R, bound) (see `constants --help`).");
  sample->add_option("-d", cfg.d, "Degree d (checked against -n)");
  sample->add_option("-n", cfg.dims, "Dimensions n_1,...,n_d")->required();
  sample->add_option("-p", cfg.p, "Exponents p_1,...,p_d")->required();
  sample->add_option("--max-draws", cfg.max_draws, "Maximum number of draws")->capture_default_str();
  sample->add_option("--target-fraction", cfg.target_fraction,
                     "Certify below this fraction of the threshold")
      ->capture_default_str();
  add_norm_flags(sample, cfg);
  add_common_flags(sample, cfg, false);
  sample->callback([&] { handler = cmd_sample; });

  auto* norm = app.add_subcommand("norm", "Bracket the norm of a form on l_p1 x ... x l_pd");
  norm->footer(
      "||A|| = sup |sum_j eps_j x^1_{j_1} ... x^d_{j_d}| over ||x^k||_{p_k} <= 1.\n"
      "Exact for d = 1, for p all inf within the vertex budget, and for p = (2,2);\n"
      "otherwise alternating ascent below and min(prod n_k^{1-1/p_k},\n"
      "sqrt(prod n_k) prod n_k^{1/2-1/p_k}) above.");
  norm->add_option("--tensor", cfg.tensor_path, "Sign tensor JSON file");
  norm->add_option("-d", cfg.d, "Degree d (checked against the tensor)");
  norm->add_option("-n", cfg.dims, "Sample a tensor of these dimensions instead");
  norm->add_option("-p", cfg.p, "Exponents p_1,...,p_d")->required();
  add_norm_flags(norm, cfg);
  add_common_flags(norm, cfg, false);
  norm->callback([&] { handler = cmd_norm; });

  auto* window = app.add_subcommand("window", "Norm / f ratios over sampled or all sign tensors");
  window->footer(
      "ratio = ||A|| / f,  f = (n_1^{1/2} + ... + n_d^{1/2}) prod n_j^{1/2-1/p_j}, p_j >= 2.\n"
      "Every ratio must be >= 1/(d 2^{(d-1)/2}); exit code 1 otherwise.");
  window->add_option("-d", cfg.d, "Degree d (checked against -n)");
  window->add_option("-n", cfg.dims, "Dimensions n_1,...,n_d")->required();
  window->add_option("-p", cfg.p, "Exponents p_1,...,p_d (all >= 2)")->required();
  window->add_option("--trials", cfg.trials, "Number of sampled tensors")->capture_default_str();
  window->add_flag("--exhaustive", cfg.exhaustive, "Enumerate every sign tensor of the shape");
  add_norm_flags(window, cfg);
  add_common_flags(window, cfg, true);
  window->callback([&] { handler = cmd_window; });

  auto* hl = app.add_subcommand("hl", "Hardy-Littlewood admissibility and blow-up exponents");
  hl->footer(
      "Admissible iff for every nonempty I: sum_{j in I} 1/rho_j <= (|I|+1)/2 - sum_{j in I} |1/p^j|.\n"
      "Blow-up exponent (trivial blocks): max{|1/rho| - (d+1)/2 + |1/p|, 0},\n"
      "  requires |1/p| <= 1/2 and rho in [1,2]^d.\n"
      "s bounds: sum_{j in I} s_j >= max{0, sum_I 1/rho_j - (|I|+1)/2 + sum_I 1/p_j}.\n"
      "With -n or --tensor, also prints the mixed norm of T(e_{j_1}^{m_1},...,e_{j_k}^{m_k}).");
  hl->add_option("-d", cfg.d, "Degree d (checked against -p)");
  hl->add_option("-p", cfg.p, "Exponents p_1,...,p_d, each in (1, inf]")->required();
  hl->add_option("--rho", cfg.rho, "Mixed-norm exponents rho_1,...,rho_k")->required();
  hl->add_option("--blocks", cfg.blocks, "Block sizes m_1,...,m_k summing to d");
  hl->add_option("-n", cfg.dims, "Sample a tensor of these dimensions for the mixed norm");
  hl->add_option("--tensor", cfg.tensor_path, "Sign tensor JSON file for the mixed norm");
  add_common_flags(hl, cfg, false);
  hl->callback([&] { handler = cmd_hl; });

  auto* sweep = app.add_subcommand("sweep", "Growth of the mixed norm of certified forms");
  sweep->footer(
      "For each n: certify a form on (l_p1^n, ..., l_pd^n) and record\n"
      "ratio = (sum_{j_1} (... (sum_{j_d} |A|^{rho_d}) ...)^{rho_1/rho_2})^{1/rho_1} / bound.\n"
      "The log-log slope of ratio against n estimates max{|1/rho| - (d+1)/2 + |1/p|, 0}.");
  sweep->add_option("-d", cfg.d, "Degree d");
  sweep->add_option("-p", cfg.p, "Exponents p_1,...,p_d")->required();
  sweep->add_option("--rho", cfg.rho, "Mixed-norm exponents rho_1,...,rho_d")->required();
  sweep->add_option("-n", cfg.dims, "Comma list of dimensions n to sweep")->required();
  sweep->add_option("--trials", cfg.trials, "Forms per n")->capture_default_str();
  sweep->add_option("--max-draws", cfg.max_draws, "Maximum draws per form")->capture_default_str();
  sweep->add_option("--target-fraction", cfg.target_fraction,
                    "Certify below this fraction of the threshold")
      ->capture_default_str();
  add_norm_flags(sweep, cfg);
  add_common_flags(sweep, cfg, true);
  sweep->callback([&] {
    if (cfg.trials == 100 && sweep->count("--trials") == 0) cfg.trials = 1;
    handler = cmd_sweep;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return handler(cfg);
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const DrawsExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const CertificationUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
}
