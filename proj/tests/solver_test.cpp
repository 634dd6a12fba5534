#include "dtcae/solver.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dtcae/errors.hpp"
#include "dtcae/gradcheck.hpp"
#include "fit_oracle.hpp"
#include "test_util.hpp"

namespace dtcae {
namespace {

using testing::random_matrix;
using testing::relative_diff;
using testing::scalar_dataset;
using testing::scalar_point;

TEST(SolveSystem, IdentityFeaturesReturnTargets) {
  const SolveSystem sys{Matrix::identity(3), Matrix{{1, 0, 0}, {0, 1, 1}}};
  EXPECT_EQ(solve_system(sys, 0.0), transpose(sys.R));
  const Matrix shrunk = solve_system(sys, 1.0);
  EXPECT_LT(max_abs_diff(shrunk, scaled(transpose(sys.R), 0.5)), 1e-15);
}

TEST(SolveSystem, MatchesNormalEquationOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix F = random_matrix(4, 12, rng), R = random_matrix(3, 12, rng);
    for (double lambda : {0.0, 1e-6, 0.5}) {
      const Matrix expected = testing::to_matrix(oracle::ridge(testing::to_dense(F), testing::to_dense(R), lambda));
      EXPECT_LT(relative_diff(solve_system({F, R}, lambda), expected), 1e-9);
    }
  }
}

TEST(SolveSystem, RankOneNeedsRidge) {
  const SolveSystem sys{Matrix{{1, 2, 3}, {2, 4, 6}}, Matrix{{1, 1, 1}}};
  try {
    solve_system(sys, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Singular);
  }
  const Matrix expected = testing::to_matrix(oracle::ridge(testing::to_dense(sys.F), testing::to_dense(sys.R), 0.1));
  EXPECT_LT(relative_diff(solve_system(sys, 0.1), expected), 1e-10);
}

TEST(SolveTheta, IdentityAttributesRecoverFeatures) {
  Hyper h;
  h.alpha = 1;
  h.ma = h.m0 = h.mt = 1;
  h.k = 1;
  h.lambda = 0.0;
  const Problem prob = make_problem(
      scalar_dataset({{scalar_point({2}, {1, 0}, 0)}, {scalar_point({5}, {0, 1}, 0), scalar_point({4}, {0, 1}, 0)}},
                     2, 1, 2),
      h);
  ModelParams p = testing::identity_scalar_params(2, 2, 1);
  // Attribute 1 appears twice with features 5 and 4, so its coefficient is the mean.
  const Matrix theta = solve_Theta(prob, compute_forward(prob, p));
  EXPECT_NEAR(theta(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(theta(1, 0), 4.5, 1e-12);
}

TEST(HeadSystem, EmptyPoolIsDataError) {
  TinyInstance inst = random_tiny_instance(32, 0.0);
  const ForwardCache cache = compute_forward(inst.problem, inst.params);
  inst.problem.ds.domains.back().labeledCount = 0;
  try {
    head_system(inst.problem, inst.params, cache, Head::Domain, inst.problem.target());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
}

double regularized(const Problem& prob, const ModelParams& p, const Matrix& U, double lambda) {
  return objective(prob, p).total + lambda * squared_norm(U);
}

TEST(ClosedForm, NoSmallPerturbationImproves) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 4; ++trial) {
    TinyInstance inst = random_tiny_instance(rng(), 0.0);
    const double lambda = 1e-6;
    inst.problem.hyper.lambda = lambda;
    const ForwardCache cache = compute_forward(inst.problem, inst.params);
    std::vector<Matrix*> slots{&inst.params.Ua, &inst.params.U0, &inst.params.Ut[0], &inst.params.Theta};
    for (Matrix* slot : slots) {
      if (slot == &inst.params.Ua) *slot = solve_Ua(inst.problem, inst.params, cache);
      if (slot == &inst.params.U0) *slot = solve_U0(inst.problem, inst.params, cache);
      if (slot == &inst.params.Ut[0]) *slot = solve_Ut(inst.problem, inst.params, cache, 0);
      if (slot == &inst.params.Theta) *slot = solve_Theta(inst.problem, cache);
      const Matrix best = *slot;
      // Theta's ridge solve minimizes the attribute term alone, which enters scaled by C1.
      const double weight = slot == &inst.params.Theta ? lambda * inst.problem.hyper.C1 : lambda;
      const double base = regularized(inst.problem, inst.params, best, weight);
      for (int k = 0; k < 10; ++k) {
        Matrix dir = random_matrix(best.rows(), best.cols(), rng);
        dir = scaled(dir, 1e-3 / frobenius_norm(dir));
        *slot = add(best, dir);
        EXPECT_GE(regularized(inst.problem, inst.params, *slot, weight), base - 1e-12 * (1.0 + base));
      }
      *slot = best;
    }
  }
}

TEST(Sweep, ZeroStepLeavesFiltersUnchanged) {
  TinyInstance inst = random_tiny_instance(34, 0.0);
  inst.problem.hyper.tau = 0.0;
  ForwardCache cache = compute_forward(inst.problem, inst.params);
  const Matrix before = inst.params.W0.W;
  sweep_filters(inst.problem, inst.params, cache, Family::Shared);
  EXPECT_EQ(inst.params.W0.W, before);
}

TEST(Sweep, InactiveFiltersStayPut) {
  Hyper h;
  h.alpha = 1;
  h.ma = h.m0 = h.mt = 1;
  h.k = 1;
  const Problem prob = make_problem(
      scalar_dataset({{scalar_point({1, 2}, {1}, 0)}, {scalar_point({3}, {1}, 0), scalar_point({1}, {1}, 0)}}, 1, 1,
                     2),
      h);
  ModelParams p = zero_params(2, 1, 1, 1, 1, 1, 1, 1);
  p.Wa.W = Matrix{{-1}};
  p.Ua = Matrix{{2}};
  ForwardCache cache = compute_forward(prob, p);
  sweep_filters(prob, p, cache, Family::Attribute);
  EXPECT_EQ(p.Wa.W, Matrix{{-1}});
}

TEST(Sweep, BacktrackingNeverIncreasesObjective) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    TinyInstance inst = random_tiny_instance(rng(), 0.0);
    inst.problem.hyper.tau = 0.5;
    inst.problem.hyper.innerSteps = 3;
    ForwardCache cache = compute_forward(inst.problem, inst.params);
    double prev = objective(inst.problem, inst.params, cache).total;
    for (Family f : {Family::Attribute, Family::Shared, Family::Auxiliary, Family::Target}) {
      sweep_filters(inst.problem, inst.params, cache, f, 0);
      const double now = objective(inst.problem, inst.params, cache).total;
      EXPECT_LE(now, prev);
      prev = now;
    }
    // The incremental cache stays in sync with a fresh forward pass.
    EXPECT_NEAR(objective(inst.problem, inst.params).total, prev, 1e-10 * (1.0 + prev));
  }
}

TEST(Fit, ZeroIterationsReturnsInitialization) {
  TinyInstance inst = random_tiny_instance(36, 0.0);
  inst.problem.hyper.eta = 0;
  const FitResult r = fit(inst.problem, 9);
  EXPECT_EQ(r.report.iterations, 0u);
  EXPECT_TRUE(r.report.objectiveTrace.empty());
  const ModelParams init = init_params(inst.problem, 9);
  EXPECT_EQ(r.params.W0.W, init.W0.W);
  EXPECT_EQ(r.params.U0, init.U0);
}

TEST(Fit, InitializationIsUniformWithinScale) {
  const TinyInstance inst = random_tiny_instance(37, 0.0);
  const ModelParams p = init_params(inst.problem, 4);
  const double s = 1.0 / std::sqrt(static_cast<double>(inst.problem.hyper.alpha * inst.problem.ds.d));
  for (double v : p.Wa.W.data()) EXPECT_LE(std::abs(v), s);
  EXPECT_EQ(squared_norm(p.Ua) + squared_norm(p.U0) + squared_norm(p.Theta), 0.0);
}

TEST(Fit, DeterministicAndMonotone) {
  TinyInstance inst = random_tiny_instance(38, 0.0);
  inst.problem.hyper.eta = 15;
  inst.problem.hyper.tau = 0.1;
  const FitResult a = fit(inst.problem, 5);
  const FitResult b = fit(inst.problem, 5);
  ASSERT_EQ(a.report.iterations, b.report.iterations);
  for (std::size_t i = 0; i < a.report.iterations; ++i) {
    EXPECT_EQ(a.report.objectiveTrace[i].total, b.report.objectiveTrace[i].total);
    if (i > 0) EXPECT_LE(a.report.objectiveTrace[i].total, a.report.objectiveTrace[i - 1].total);
  }
  EXPECT_EQ(a.params.Wa.W, b.params.Wa.W);
}

TEST(Fit, StopsWhenChangeFallsBelowTolerance) {
  TinyInstance inst = random_tiny_instance(39, 0.0);
  inst.problem.hyper.eps = 1e9;
  inst.problem.hyper.eta = 50;
  const FitResult r = fit(inst.problem, 1);
  EXPECT_EQ(r.report.iterations, 2u);
  EXPECT_TRUE(r.report.converged);
}

TEST(Fit, OneIterationWithoutRegularizersIsSequentialRidge) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 5; ++trial) {
    TinyInstance inst = random_tiny_instance(rng(), 0.0);
    Hyper& h = inst.problem.hyper;
    h.C1 = h.C2 = h.C3 = 0.0;
    h.tau = 0.0;
    h.eta = 1;
    h.lambda = 1e-3;
    const FitResult r = fit(inst.problem, 2);
    const ModelParams init = init_params(inst.problem, 2);
    const auto expected = testing::sequential_ridge(inst.problem, compute_forward(inst.problem, init), h.lambda);
    EXPECT_LT(max_abs_diff(r.params.Ua, expected.Ua), 1e-8);
    EXPECT_LT(max_abs_diff(r.params.U0, expected.U0), 1e-8);
    for (std::size_t t = 0; t < expected.Ut.size(); ++t) EXPECT_LT(max_abs_diff(r.params.Ut[t], expected.Ut[t]), 1e-8);
  }
}

TEST(Fit, AttributeHeadCanBeDisabled) {
  TinyInstance inst = random_tiny_instance(41, 0.0);
  inst.problem.hyper.attributeHead = false;
  inst.problem.hyper.eta = 3;
  EXPECT_EQ(squared_norm(fit(inst.problem, 1).params.Ua), 0.0);
}

TEST(Evaluate, CountsCorrectPredictions) {
  ModelParams p = testing::identity_scalar_params(2, 1, 2);
  p.U0 = Matrix{{1, -1}};  // positive inputs predict class 0
  DomainDataset test{{scalar_point({1}, {0}, 0), scalar_point({2}, {0}, 0)}, 2};
  EXPECT_EQ(evaluate(test, p, 1), 1.0);
  test.points[1].label = 1;
  EXPECT_EQ(evaluate(test, p, 1), 0.5);
}

TEST(Evaluate, EmptySetIsDataError) {
  try {
    evaluate(DomainDataset{}, testing::identity_scalar_params(2, 1, 2), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
}

}  // namespace
}  // namespace dtcae
