#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nsaflow/kernels.hpp"
#include "nsaflow/synthetic.hpp"

using namespace nsaflow;
namespace k = nsaflow::kernels;

namespace {

std::vector<double> sample(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = 3.0 * rng.normal();
  // A few exact zeros and ties with the threshold.
  if (n > 3) {
    v[1] = 0.0;
    v[2] = -0.0;
    v[3] = 0.25;
  }
  return v;
}

// Lengths that exercise the 8-wide body, the 4-wide remainder and the tail.
const std::vector<std::size_t> kLengths{0, 1, 3, 4, 7, 8, 9, 15, 16, 17, 33, 100, 1001};

}  // namespace

TEST(Kernels, ScalarReferenceMatchesLoops) {
  const auto& s = k::table(k::SimdLevel::scalar);
  const auto x = sample(57, 1);
  const auto y = sample(57, 2);
  double ss = 0, sd = 0, dot = 0, l1 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ss += x[i] * x[i];
    sd += (x[i] - y[i]) * (x[i] - y[i]);
    dot += x[i] * y[i];
    l1 += std::abs(x[i]);
  }
  EXPECT_DOUBLE_EQ(s.sum_squares(x.data(), x.size()), ss);
  EXPECT_DOUBLE_EQ(s.squared_distance(x.data(), y.data(), x.size()), sd);
  EXPECT_DOUBLE_EQ(s.dot(x.data(), y.data(), x.size()), dot);
  EXPECT_DOUBLE_EQ(s.abs_sum(x.data(), x.size()), l1);
}

TEST(Kernels, ActiveHonoursEnvironmentOverride) {
  // The process-wide choice is made once; just check it is a valid table.
  const auto& a = k::active();
  EXPECT_TRUE(a.level == k::SimdLevel::scalar || a.level == k::SimdLevel::avx2);
  EXPECT_EQ(k::name(k::SimdLevel::scalar), "scalar");
}

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelEquivalence, Avx2AgreesWithScalar) {
  if (!k::available(k::SimdLevel::avx2)) GTEST_SKIP() << "AVX2 not available";
  const auto& s = k::table(k::SimdLevel::scalar);
  const auto& v = k::table(k::SimdLevel::avx2);
  ASSERT_EQ(v.level, k::SimdLevel::avx2);
  const std::size_t n = GetParam();
  const auto x = sample(n, 10 + n);
  const auto y = sample(n, 20 + n);

  // Reductions: same value up to reassociation.
  const auto close = [](double a, double b, double scale) { return std::abs(a - b) <= 1e-13 * (scale + 1.0); };
  const double ss = s.sum_squares(x.data(), n);
  EXPECT_TRUE(close(v.sum_squares(x.data(), n), ss, ss));
  const double sd = s.squared_distance(x.data(), y.data(), n);
  EXPECT_TRUE(close(v.squared_distance(x.data(), y.data(), n), sd, sd));
  const double l1 = s.abs_sum(x.data(), n);
  EXPECT_TRUE(close(v.abs_sum(x.data(), n), l1, l1));
  EXPECT_TRUE(close(v.dot(x.data(), y.data(), n), s.dot(x.data(), y.data(), n), std::sqrt(ss * s.sum_squares(y.data(), n))));
  EXPECT_EQ(v.count_abs_below(x.data(), n, 0.25), s.count_abs_below(x.data(), n, 0.25));

  double s_sq = 0, s_worst = 0, v_sq = 0, v_worst = 0;
  s.negative_part(x.data(), n, &s_sq, &s_worst);
  v.negative_part(x.data(), n, &v_sq, &v_worst);
  EXPECT_TRUE(close(v_sq, s_sq, s_sq));
  EXPECT_EQ(v_worst, s_worst);

  // Elementwise kernels: bit-identical.
  std::vector<double> a(n), b(n);
  s.axpby(0.3, x.data(), -1.7, y.data(), a.data(), n);
  v.axpby(0.3, x.data(), -1.7, y.data(), b.data(), n);
  EXPECT_EQ(a, b);
  s.clamp_nonneg(x.data(), a.data(), n);
  v.clamp_nonneg(x.data(), b.data(), n);
  EXPECT_EQ(a, b);
  for (double tau : {0.0, 0.25, 2.0}) {
    s.soft_threshold(x.data(), tau, a.data(), n);
    v.soft_threshold(x.data(), tau, b.data(), n);
    EXPECT_EQ(a, b);
  }
}

TEST_P(KernelEquivalence, InPlaceAliasingIsAllowed) {
  const std::size_t n = GetParam();
  for (auto level : {k::SimdLevel::scalar, k::SimdLevel::avx2}) {
    const auto& t = k::table(level);
    auto x = sample(n, 99);
    std::vector<double> expected(n);
    for (std::size_t i = 0; i < n; ++i) expected[i] = std::max(x[i], 0.0);
    t.clamp_nonneg(x.data(), x.data(), n);
    EXPECT_EQ(x, expected);
  }
}

INSTANTIATE_TEST_SUITE_P(Lengths, KernelEquivalence, ::testing::ValuesIn(kLengths));
