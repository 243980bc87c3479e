#include <gtest/gtest.h>

#include <set>

#include "nsaflow/errors.hpp"
#include "nsaflow/flow.hpp"
#include "nsaflow/objective.hpp"
#include "nsaflow/synthetic.hpp"
#include "support.hpp"

using namespace nsaflow;
using namespace testsupport;

namespace {

std::set<Index> support_of(const DenseMatrix& m, Index col, double thr) {
  std::set<Index> s;
  for (Index i = 0; i < m.rows(); ++i)
    if (m(i, col) > thr) s.insert(i);
  return s;
}

}  // namespace

TEST(Rng, UniformRangeAndMoments) {
  Rng rng(1);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
  sum = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(sq / n, 1.0, 0.03);
}

TEST(Synthetic, SameSeedSameMatrix) {
  EXPECT_TRUE(block_nonneg(12, 3, 0.1, 5) == block_nonneg(12, 3, 0.1, 5));
  EXPECT_TRUE(correlated_noise(12, 3, 0.1, 5) == correlated_noise(12, 3, 0.1, 5));
  EXPECT_TRUE(toy43(0.05, 5) == toy43(0.05, 5));
  EXPECT_TRUE(two_factor(30, 12, 3, 0.1, 5).x == two_factor(30, 12, 3, 0.1, 5).x);
  EXPECT_TRUE(nonneg_lowrank(30, 12, 3, 0.1, 5) == nonneg_lowrank(30, 12, 3, 0.1, 5));
  EXPECT_FALSE(block_nonneg(12, 3, 0.1, 5) == block_nonneg(12, 3, 0.1, 6));
  EXPECT_EQ(parse_synthetic_kind("toy43"), SyntheticKind::toy43);
  EXPECT_FALSE(parse_synthetic_kind("gaussian").has_value());
}

TEST(Synthetic, BlockNonnegNoiseFreeIsOrthogonal) {
  const DenseMatrix b = block_nonneg(10, 3, 0.0, 1);
  EXPECT_GE(b.minCoeff(), 0.0);
  EXPECT_EQ(orth_defect_invariant(b), 0.0);
  for (Index i = 0; i < b.rows(); ++i) EXPECT_EQ((b.row(i).array() > 0).count(), 1);
  EXPECT_EQ(support_of(b, 0, 0).size(), 4u);
  EXPECT_EQ(support_of(b, 2, 0).size(), 3u);
}

TEST(Synthetic, TwoFactorGroundTruth) {
  const TwoFactorData d = two_factor(80, 20, 5, 0.0, 2);
  EXPECT_NEAR(d.factors.col(0).norm(), 1.0, 1e-14);
  EXPECT_NEAR(d.factors.col(1).norm(), 1.0, 1e-14);
  EXPECT_EQ(d.factors.col(0).dot(d.factors.col(1)), 0.0);
  // Noise-free data is rank two and spanned by the factors.
  const DenseMatrix resid = d.x - d.x * d.factors * d.factors.transpose();
  EXPECT_LT(resid.norm(), 1e-10 * d.x.norm());
  const DenseMatrix scores = d.x * d.factors;
  EXPECT_NEAR(scores.col(0).dot(scores.col(1)), 0.0, 1e-9 * scores.squaredNorm());
  EXPECT_NEAR(scores.col(0).norm() / std::sqrt(79.0), 3.0, 1e-10);
  EXPECT_NEAR(scores.col(1).norm() / std::sqrt(79.0), 2.0, 1e-10);
}

TEST(Synthetic, Toy43FlowRecoversSupports) {
  const DenseMatrix truth = toy43_truth();
  const DenseMatrix x = toy43(0.05, 7);
  FlowConfig cfg;
  const FlowResult r = run_nsa_flow(x, std::nullopt, cfg);
  for (Index j = 0; j < 3; ++j) {
    const double peak = r.y_best.col(j).maxCoeff();
    EXPECT_EQ(support_of(r.y_best, j, 0.5 * peak), support_of(truth, j, 0.0)) << j;
  }
}
