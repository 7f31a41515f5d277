#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "kszlab/errors.hpp"
#include "kszlab/ksz.hpp"
#include "kszlab/norm.hpp"
#include "support.hpp"

using namespace kszlab;
using kszlab::testing::hadamard2;
using kszlab::testing::rel_diff;

namespace {

const Exponent kInf = Exponent::infinity();

double svd_oracle(const SignTensor& a) {
  const auto n1 = static_cast<Eigen::Index>(a.shape().dim(0));
  const auto n2 = static_cast<Eigen::Index>(a.shape().dim(1));
  Eigen::MatrixXd m(n1, n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n2; ++j) m(i, j) = a[static_cast<std::size_t>(i * n2 + j)];
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

void expect_valid_report(const SignTensor& a, const PExponents& p, const BoundReport& r) {
  EXPECT_LE(r.lower, r.upper * (1.0 + 1e-9));
  ASSERT_EQ(r.witness.size(), a.order());
  for (std::size_t k = 0; k < a.order(); ++k) {
    EXPECT_LE(lp_norm(r.witness[k], p[k]), 1.0 + 1e-9);
  }
  EXPECT_LE(rel_diff(std::abs(evaluate(a, r.witness)), r.lower), 1e-9);
}

}  // namespace

TEST(ExactNormLinf, Examples) {
  EXPECT_DOUBLE_EQ(exact_norm_linf(SignTensor::ones(Shape({2, 3, 4}))), 24.0);
  EXPECT_DOUBLE_EQ(exact_norm_linf(hadamard2()), 2.0);
  EXPECT_DOUBLE_EQ(exact_norm_linf(sample_signs(Shape({7}), 3)), 7.0);
}

TEST(ExactNormLinf, BudgetExceededNamesTheSize) {
  const SignTensor a = sample_signs(Shape({20, 20}), 1);
  try {
    exact_norm_linf(a, std::uint64_t{1} << 10);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.required_log2(), 20.0);
    EXPECT_NE(std::string(e.what()).find("2^20"), std::string::npos) << e.what();
  }
}

TEST(ExactNormLinf, MatchesBruteForceOverAllCoordinates) {
  CounterRng rng(31);
  int checked = 0;
  while (checked < 150) {
    const Shape shape = kszlab::testing::random_shape(rng, 4, 4);
    if (shape.dim_sum() > 10) continue;
    const SignTensor a = sample_signs(shape, rng());
    EXPECT_DOUBLE_EQ(exact_norm_linf(a), kszlab::testing::brute_force_linf(a))
        << "shape order " << shape.order();
    ++checked;
  }
}

TEST(ExactNormLinf, WorkerCountDoesNotChangeTheReport) {
  CounterRng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const SignTensor a = sample_signs(Shape({6, 5, 4}), rng());
    const auto one = exact_norm_linf_report(a, kDefaultVertexBudget, 1);
    const auto four = exact_norm_linf_report(a, kDefaultVertexBudget, 4);
    EXPECT_EQ(one.lower, four.lower);
    EXPECT_EQ(one.witness, four.witness);
    expect_valid_report(a, PExponents(3, kInf), one);
  }
}

TEST(ExactNormLinf, TieBreakPrefersPlusFirst) {
  // All-ones: every coordinate all +1 attains the max.
  const auto r = exact_norm_linf_report(SignTensor::ones(Shape({3, 3})));
  EXPECT_EQ(r.witness[0], (std::vector<double>{1, 1, 1}));
}

TEST(PowerIteration, Examples) {
  EXPECT_NEAR(exact_norm_l2_bilinear(hadamard2()), std::sqrt(2.0), 1e-9);
  for (std::size_t n : {1u, 3u, 6u}) {
    EXPECT_NEAR(exact_norm_l2_bilinear(SignTensor::ones(Shape({n, n}))), static_cast<double>(n),
                1e-9);
  }
}

TEST(PowerIteration, MatchesDenseSvd) {
  CounterRng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n1 = 1 + rng() % 9;
    const std::size_t n2 = 1 + rng() % 9;
    const SignTensor a = sample_signs(Shape({n1, n2}), rng());
    const auto triple = top_singular_triple(a);
    EXPECT_LE(rel_diff(triple.sigma, svd_oracle(a)), 1e-9) << n1 << "x" << n2;
    EXPECT_NEAR(lp_norm(triple.left, Exponent(2.0)), 1.0, 1e-12);
    EXPECT_NEAR(lp_norm(triple.right, Exponent(2.0)), 1.0, 1e-12);
    EXPECT_LE(rel_diff(evaluate(a, {triple.left, triple.right}), triple.sigma), 1e-9);
  }
}

TEST(PowerIteration, NonMatrixInputFails) {
  EXPECT_THROW(top_singular_triple(sample_signs(Shape({2, 2, 2}), 1)), InvalidArgument);
}

TEST(PowerIteration, IterationCapReportsBestEstimate) {
  const SignTensor a = sample_signs(Shape({9, 9}), 4);
  try {
    top_singular_triple(a, 1e-15, 1);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.best_estimate(), 0.0);
    EXPECT_LE(e.best_estimate(), svd_oracle(a) * (1.0 + 1e-9));
  }
}

TEST(AlternatingAscent, AllOnesAtInfinity) {
  const SignTensor a = SignTensor::ones(Shape({3, 4, 2}));
  EXPECT_DOUBLE_EQ(alt_max_norm(a, PExponents(3, kInf)).value, 24.0);
}

TEST(AlternatingAscent, HadamardBilinear) {
  AscentOptions options;
  options.restarts = 5;
  EXPECT_NEAR(alt_max_norm(hadamard2(), PExponents(2, Exponent(2.0)), options).value,
              std::sqrt(2.0), 1e-9);
}

TEST(AlternatingAscent, TrilinearMatchesExhaustive) {
  CounterRng rng(34);
  AscentOptions options;
  options.restarts = 20;
  for (int trial = 0; trial < 30; ++trial) {
    const SignTensor a = sample_signs(Shape({2, 2, 2}), rng());
    options.seed = rng();
    EXPECT_NEAR(alt_max_norm(a, PExponents(3, kInf), options).value, exact_norm_linf(a), 1e-9);
  }
}

TEST(AlternatingAscent, ObjectiveNeverDecreases) {
  CounterRng rng(35);
  AscentOptions options;
  options.restarts = 4;
  options.record_trace = true;
  const std::vector<PExponents> ps{
      {Exponent(2.0), Exponent(2.0)},
      {Exponent(1.5), Exponent(3.0), kInf},
      {Exponent(4.0), Exponent(4.0), Exponent(4.0)},
      {Exponent(1.0), Exponent(2.5)}};
  for (const auto& p : ps) {
    std::vector<std::size_t> dims(p.size());
    for (auto& n : dims) n = 2 + rng() % 5;
    const SignTensor a = sample_signs(Shape(dims), rng());
    options.seed = rng();
    const auto result = alt_max_norm(a, p, options);
    ASSERT_EQ(result.traces.size(), options.restarts);
    for (const auto& trace : result.traces) {
      for (std::size_t i = 1; i < trace.size(); ++i) {
        EXPECT_GE(trace[i], trace[i - 1] - 1e-12 * std::max(1.0, std::abs(trace[i - 1])));
      }
    }
    EXPECT_LE(rel_diff(std::abs(evaluate(a, result.witness)), result.value), 1e-9);
    for (std::size_t k = 0; k < p.size(); ++k) {
      EXPECT_LE(lp_norm(result.witness[k], p[k]), 1.0 + 1e-9);
    }
  }
}

TEST(AlternatingAscent, WorkerCountDoesNotChangeTheResult) {
  const SignTensor a = sample_signs(Shape({5, 4, 3}), 9);
  const PExponents p{Exponent(3.0), Exponent(3.0), Exponent(3.0)};
  AscentOptions one;
  one.seed = 17;
  AscentOptions many = one;
  many.workers = 3;
  const auto r1 = alt_max_norm(a, p, one);
  const auto r3 = alt_max_norm(a, p, many);
  EXPECT_EQ(r1.value, r3.value);
  EXPECT_EQ(r1.witness, r3.witness);
  EXPECT_EQ(r1.best_restart, r3.best_restart);
}

TEST(UpperBounds, FrobeniusExamples) {
  for (std::size_t n : {1u, 3u, 7u}) {
    EXPECT_NEAR(upper_bound_frobenius(SignTensor::ones(Shape({n, n})), PExponents(2, Exponent(2.0))),
                static_cast<double>(n), 1e-12);
  }
  EXPECT_NEAR(upper_bound_frobenius(hadamard2(), PExponents(2, kInf)), 4.0, 1e-12);
  EXPECT_NEAR(upper_bound_frobenius(sample_signs(Shape({9}), 1), {Exponent(2.0)}), 3.0, 1e-12);
  EXPECT_THROW(upper_bound_frobenius(hadamard2(), {Exponent(1.5), kInf}), InvalidArgument);
}

TEST(UpperBounds, L1ChainDominatesEveryEstimate) {
  CounterRng rng(36);
  for (int trial = 0; trial < 40; ++trial) {
    const SignTensor a = sample_signs(Shape({1 + rng() % 4, 1 + rng() % 4, 1 + rng() % 3}), rng());
    const PExponents p(3, kInf);
    EXPECT_LE(exact_norm_linf(a), upper_bound_l1_chain(a.shape(), p) * (1.0 + 1e-12));
  }
}

TEST(NormBracket, ExactRoutes) {
  CounterRng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const SignTensor a = sample_signs(Shape({1 + rng() % 5, 1 + rng() % 5}), rng());
    const PExponents pinf(2, kInf);
    const auto r = norm_bracket(a, pinf);
    EXPECT_EQ(r.lower, r.upper);
    EXPECT_EQ(r.lower, exact_norm_linf(a));
    EXPECT_EQ(r.lower_method, method::kExhaustiveLinf);
    expect_valid_report(a, pinf, r);

    const PExponents p2(2, Exponent(2.0));
    const auto s = norm_bracket(a, p2);
    EXPECT_TRUE(s.exact);
    EXPECT_NEAR(s.lower, svd_oracle(a), 1e-9 * svd_oracle(a));
    EXPECT_EQ(s.upper_method, method::kPowerIterationL2);
    expect_valid_report(a, p2, s);
  }
  const SignTensor v = sample_signs(Shape({6}), 2);
  const auto d1 = norm_bracket(v, {Exponent(3.0)});
  EXPECT_NEAR(d1.lower, std::pow(6.0, 2.0 / 3.0), 1e-12);
  EXPECT_EQ(d1.lower_method, method::kDualNorm);
}

TEST(NormBracket, HeuristicRouteReportsAGap) {
  const SignTensor a = sample_signs(Shape({4, 4, 4}), 42);
  const PExponents p(3, Exponent(4.0));
  const auto r = norm_bracket(a, p);
  EXPECT_FALSE(r.exact);
  EXPECT_EQ(r.lower_method, method::kAlternatingAscent);
  EXPECT_GT(r.gap(), 0.0);
  expect_valid_report(a, p, r);
  const auto j = to_json(r);
  for (const char* key : {"lower", "upper", "lower_method", "upper_method", "witness"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.size(), 5u);
}

TEST(NormBracket, SandwichAgainstExactAndFrobenius) {
  CounterRng rng(38);
  for (int trial = 0; trial < 30; ++trial) {
    const SignTensor a = sample_signs(Shape({1 + rng() % 4, 1 + rng() % 4, 1 + rng() % 4}), rng());
    const PExponents p(3, kInf);
    AscentOptions options;
    options.seed = rng();
    const double lower = alt_max_norm(a, p, options).value;
    const double exact = exact_norm_linf(a);
    EXPECT_LE(lower, exact * (1.0 + 1e-9));
    EXPECT_LE(exact, upper_bound_frobenius(a, p) * (1.0 + 1e-9));
  }
  for (int trial = 0; trial < 30; ++trial) {
    const SignTensor a = sample_signs(Shape({1 + rng() % 7, 1 + rng() % 7}), rng());
    const PExponents p(2, Exponent(2.0));
    AscentOptions options;
    options.seed = rng();
    const double exact = exact_norm_l2_bilinear(a);
    EXPECT_LE(alt_max_norm(a, p, options).value, exact * (1.0 + 1e-9));
    EXPECT_LE(exact, upper_bound_frobenius(a, p) * (1.0 + 1e-9));
  }
}

TEST(NormBracket, MonotoneInTheExponents) {
  CounterRng rng(39);
  const std::vector<Exponent> ladder{Exponent(1.0), Exponent(1.5), Exponent(2.0), Exponent(4.0),
                                     kInf};
  for (int trial = 0; trial < 20; ++trial) {
    const SignTensor a = sample_signs(Shape({1 + rng() % 4, 1 + rng() % 4}), rng());
    const std::size_t i1 = rng() % ladder.size();
    const std::size_t i2 = rng() % ladder.size();
    const std::size_t j1 = i1 + rng() % (ladder.size() - i1);
    const std::size_t j2 = i2 + rng() % (ladder.size() - i2);
    const PExponents small{ladder[i1], ladder[i2]};
    const PExponents big{ladder[j1], ladder[j2]};
    NormConfig config;
    config.seed = rng();
    EXPECT_LE(norm_bracket(a, small, config).lower,
              norm_bracket(a, big, config).upper * (1.0 + 1e-9));
  }
}

TEST(NormBracket, HasExactMethodMatchesRouting) {
  EXPECT_TRUE(has_exact_method(Shape({3, 3}), PExponents(2, kInf), kDefaultVertexBudget));
  EXPECT_TRUE(has_exact_method(Shape({30, 30}), PExponents(2, Exponent(2.0)), kDefaultVertexBudget));
  EXPECT_TRUE(has_exact_method(Shape({30}), {Exponent(3.0)}, kDefaultVertexBudget));
  EXPECT_FALSE(has_exact_method(Shape({30, 30}), PExponents(2, kInf), kDefaultVertexBudget));
  EXPECT_FALSE(has_exact_method(Shape({3, 3, 3}), PExponents(3, Exponent(2.0)), kDefaultVertexBudget));
}
