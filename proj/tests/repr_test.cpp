#include "dtcae/repr.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dtcae/errors.hpp"
#include "test_util.hpp"

namespace dtcae {
namespace {

using testing::random_matrix;

InstanceSet example_set() { return InstanceSet{Matrix{{1, 2, 3}, {4, 5, 6}}}; }

// Loop oracle: explicit per-window, per-filter evaluation from the raw
// instances, without building the window matrix.
std::vector<double> pooled_oracle(const Matrix& W, const InstanceSet& x, std::size_t alpha,
                                  std::vector<std::size_t>* argmax = nullptr) {
  std::vector<double> out(W.cols());
  if (argmax) argmax->assign(W.cols(), 0);
  for (std::size_t k = 0; k < W.cols(); ++k) {
    double best = 0.0;
    for (std::size_t j = 0; j + alpha <= x.n(); ++j) {
      double pre = 0.0;
      for (std::size_t s = 0; s < alpha; ++s)
        for (std::size_t r = 0; r < x.d(); ++r) pre += W(s * x.d() + r, k) * x.instances(r, j + s);
      if (j == 0 || pre > best) {
        best = pre;
        if (argmax) (*argmax)[k] = j;
      }
    }
    out[k] = std::max(0.0, best);
  }
  return out;
}

TEST(SlideWindow, StacksConsecutiveInstances) {
  const WindowedInput z = slide_window(example_set(), 2);
  EXPECT_EQ(z.w(), 2u);
  EXPECT_EQ(z.Z, (Matrix{{1, 2}, {4, 5}, {2, 3}, {5, 6}}));
}

TEST(SlideWindow, UnitWindowIsIdentity) {
  EXPECT_EQ(slide_window(example_set(), 1).Z, example_set().instances);
}

TEST(SlideWindow, TooFewInstancesIsWindowError) {
  try {
    slide_window(InstanceSet{Matrix{{1}, {2}}}, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Window);
  }
}

TEST(ConvPool, NegativePreactivationsPoolToZero) {
  BranchParams W{Matrix{{1}, {-1}, {0}, {0}}};
  const BranchOutput o = conv_pool(W, slide_window(example_set(), 2));
  EXPECT_EQ(o.trace.preact[0], -3.0);
  EXPECT_EQ(o.out[0], 0.0);
  EXPECT_EQ(o.trace.argmax[0], 0u);
  EXPECT_EQ(o.out, pooled_oracle(W.W, example_set(), 2));
}

TEST(ConvPool, ZeroFiltersGiveZeroOutput) {
  const BranchOutput o = conv_pool(BranchParams{Matrix(4, 3)}, slide_window(example_set(), 2));
  EXPECT_EQ(o.out, std::vector<double>(3, 0.0));
}

TEST(ConvPool, SingleWindowArgmaxIsZero) {
  std::mt19937_64 rng(1);
  const BranchOutput o = conv_pool(BranchParams{random_matrix(6, 5, rng)}, slide_window(example_set(), 3));
  for (auto j : o.trace.argmax) EXPECT_EQ(j, 0u);
}

TEST(ConvPool, ShapeMismatch) {
  try {
    conv_pool(BranchParams{Matrix(3, 1)}, slide_window(example_set(), 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Shape);
  }
}

TEST(ConvPool, MatchesLoopOracleAndIsNonNegative) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> size(3, 9);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + trial % 4, alpha = 1 + trial % 3;
    const InstanceSet x{random_matrix(d, size(rng), rng)};
    const Matrix W = random_matrix(alpha * d, 4, rng);
    std::vector<std::size_t> argmax;
    const std::vector<double> expected = pooled_oracle(W, x, alpha, &argmax);
    const BranchOutput o = conv_pool(BranchParams{W}, slide_window(x, alpha));
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(o.out[k], expected[k], 1e-12);
      EXPECT_GE(o.out[k], 0.0);
      EXPECT_EQ(o.trace.argmax[k], argmax[k]);
      EXPECT_EQ(o.out[k], std::max(0.0, o.trace.preact[k]));
    }
  }
}

TEST(ConvPool, UnitWindowIsInvariantToInstanceOrder) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x = random_matrix(3, 6, rng);
    const BranchParams W{random_matrix(3, 5, rng)};
    const std::vector<double> before = conv_pool(W, slide_window(InstanceSet{x}, 1)).out;
    std::vector<std::size_t> perm{0, 1, 2, 3, 4, 5};
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix permuted(3, 6);
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t r = 0; r < 3; ++r) permuted(r, j) = x(r, perm[j]);
    EXPECT_EQ(conv_pool(W, slide_window(InstanceSet{permuted}, 1)).out, before);
  }
}

ModelParams random_params(std::mt19937_64& rng, std::size_t d, std::size_t alpha, std::size_t classes) {
  ModelParams p = zero_params(2, d, alpha, 3, classes, 2, 3, 2);
  for (Matrix* m : {&p.Wa.W, &p.W0.W, &p.Wt[0].W, &p.Wt[1].W, &p.Ua, &p.U0, &p.Ut[0], &p.Ut[1], &p.Theta})
    *m = random_matrix(m->rows(), m->cols(), rng);
  return p;
}

TEST(FullRep, ZeroFiltersGiveZeroVector) {
  const ModelParams p = zero_params(2, 2, 2, 3, 2, 2, 3, 4);
  const DataPoint pt{example_set(), {0, 1, 0}, 0};
  EXPECT_EQ(full_rep(pt, 1, p), std::vector<double>(9, 0.0));
}

TEST(FullRep, OrderIsSharedThenDomainThenAttribute) {
  ModelParams p = zero_params(2, 2, 1, 3, 2, 1, 1, 1);
  p.W0.W = Matrix{{1}, {0}};   // picks max of first feature: 3
  p.Wt[1].W = Matrix{{0}, {1}};  // max of second feature: 6
  p.Wa.W = Matrix{{1}, {1}};   // max of sums: 9
  const DataPoint pt{example_set(), {0, 0, 0}, std::nullopt};
  const std::vector<double> f = full_rep(pt, 1, p);
  const WindowedInput z = slide_window(pt.x, 1);
  EXPECT_EQ(f, (std::vector<double>{conv_pool(p.W0, z).out[0], conv_pool(p.Wt[1], z).out[0],
                                    conv_pool(p.Wa, z).out[0]}));
  EXPECT_EQ(f, (std::vector<double>{3, 6, 9}));
}

TEST(FullRep, UnitWindowSingleInstanceGivesFilterResponses) {
  ModelParams p = zero_params(2, 2, 1, 3, 2, 2, 2, 2);
  p.W0.W = Matrix::identity(2);
  p.Wt[0].W = Matrix{{2, 0}, {0, 3}};
  p.Wa.W = Matrix{{1, -1}, {1, 1}};
  const DataPoint pt{InstanceSet{Matrix{{0.5}, {1.5}}}, {0, 0, 0}, std::nullopt};
  EXPECT_EQ(full_rep(pt, 0, p), (std::vector<double>{0.5, 1.5, 1.0, 4.5, 2.0, 1.0}));
}

TEST(Score, ZeroHeadsGiveZeroScores) {
  std::mt19937_64 rng(4);
  ModelParams p = random_params(rng, 2, 2, 3);
  p.Ua = Matrix(2, 3);
  p.U0 = Matrix(3, 3);
  p.Ut = {Matrix(2, 3), Matrix(2, 3)};
  EXPECT_EQ(score(DataPoint{example_set(), {1, 0, 1}, 0}, 0, p), std::vector<double>(3, 0.0));
}

TEST(Score, IdentityAttributeHeadReturnsAttributeBranch) {
  std::mt19937_64 rng(5);
  ModelParams p = random_params(rng, 2, 2, 2);
  p.U0 = Matrix(3, 2);
  p.Ut = {Matrix(2, 2), Matrix(2, 2)};
  p.Ua = Matrix::identity(2);
  const DataPoint pt{example_set(), {1, 0, 1}, 0};
  EXPECT_EQ(score(pt, 1, p), conv_pool(p.Wa, slide_window(pt.x, 2)).out);
}

TEST(Score, EqualsStackedHeadTimesFullRep) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = random_params(rng, 2, 2, 3);
    const DataPoint pt{InstanceSet{random_matrix(2, 5, rng)}, {1, 0, 1}, 0};
    for (std::size_t t = 0; t < 2; ++t) {
      const std::vector<double> f = full_rep(pt, t, p);
      // Concatenated-matrix oracle: U = [U_0; U_t; U_a].
      std::vector<double> expected(3, 0.0);
      const Matrix* blocks[] = {&p.U0, &p.Ut[t], &p.Ua};
      std::size_t row = 0;
      for (const Matrix* b : blocks)
        for (std::size_t r = 0; r < b->rows(); ++r, ++row)
          for (std::size_t c = 0; c < 3; ++c) expected[c] += (*b)(r, c) * f[row];
      const std::vector<double> h = score(pt, t, p);
      for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(h[c], expected[c], 1e-12);
    }
  }
}

TEST(Score, LinearInHeadsAndArgmaxStable) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams p = random_params(rng, 2, 2, 3);
    const DataPoint pt{InstanceSet{random_matrix(2, 4, rng)}, {0, 1, 1}, 1};
    const std::vector<double> h = score(pt, 0, p);
    const std::size_t cls = predict(pt, 0, p);
    const double c = 2.5;
    p.Ua = scaled(p.Ua, c);
    p.U0 = scaled(p.U0, c);
    for (auto& u : p.Ut) u = scaled(u, c);
    const std::vector<double> hc = score(pt, 0, p);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(hc[i], c * h[i], 1e-12);
    EXPECT_EQ(predict(pt, 0, p), cls);
  }
}

TEST(Predict, ArgmaxWithSmallestIndexOnTies) {
  EXPECT_EQ(argmax_index({0.1, 0.9}), 1u);
  EXPECT_EQ(argmax_index({0.5, 0.5}), 0u);
  const ModelParams zero = zero_params(2, 2, 2, 3, 4, 2, 2, 2);
  EXPECT_EQ(predict(DataPoint{example_set(), {0, 0, 0}, 0}, 1, zero), 0u);
}

}  // namespace
}  // namespace dtcae
