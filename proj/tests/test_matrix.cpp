#include <gtest/gtest.h>

#include <vector>

#include "nsaflow/errors.hpp"
#include "nsaflow/matrix.hpp"
#include "nsaflow/objective.hpp"
#include "support.hpp"

using namespace nsaflow;
using namespace testsupport;

TEST(Matrix, FromRowMajorValidates) {
  const std::vector<double> d{1, 2, 3, 4, 5, 6};
  const DenseMatrix m = from_row_major(2, 3, d);
  EXPECT_EQ(m(0, 2), 3);
  EXPECT_EQ(m(1, 0), 4);
  EXPECT_THROW(from_row_major(2, 2, d), DimensionError);
  EXPECT_THROW(from_row_major(0, 6, d), DimensionError);
  const std::vector<double> bad{1, std::nan("")};
  EXPECT_THROW(from_row_major(1, 2, bad), NonFiniteError);
}

TEST(Matrix, FrobeniusNorm) {
  EXPECT_DOUBLE_EQ(frobenius_norm(DenseMatrix::Identity(3, 3)), std::sqrt(3.0));
  EXPECT_EQ(frobenius_norm(DenseMatrix::Zero(2, 5)), 0.0);
  DenseMatrix m(1, 2);
  m << 3, 4;
  EXPECT_DOUBLE_EQ(frobenius_norm(m), 5.0);
}

TEST(Matrix, SymEigBasics) {
  const SymEig id = sym_eig(DenseMatrix::Identity(4, 4));
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(id.eigenvalues(i), 1.0, 1e-14);
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 1;
  const SymEig e = sym_eig(d);
  EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues(1), 2.0, 1e-14);
  EXPECT_THROW(sym_eig(DenseMatrix::Zero(2, 3)), DimensionError);
}

TEST(Matrix, SymEigReconstruction) {
  const DenseMatrix a = randn(6, 6, 3);
  const DenseMatrix s = a + a.transpose();
  const SymEig e = sym_eig(s);
  const DenseMatrix rec = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
  EXPECT_LT((rec - s).norm() / s.norm(), 1e-8);
  EXPECT_LT((e.eigenvectors.transpose() * e.eigenvectors - DenseMatrix::Identity(6, 6)).norm(), 1e-8);
  for (Index i = 1; i < 6; ++i) EXPECT_LE(e.eigenvalues(i - 1), e.eigenvalues(i));
}

TEST(Matrix, InvSqrtPsd) {
  EXPECT_LT((inv_sqrt_psd(DenseMatrix::Identity(3, 3)) - DenseMatrix::Identity(3, 3)).norm(), 1e-14);
  DenseMatrix d = DenseMatrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 9;
  const DenseMatrix r = inv_sqrt_psd(d);
  EXPECT_NEAR(r(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(r(1, 1), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-14);
}

TEST(Matrix, InvSqrtPsdRankDeficient) {
  DenseMatrix y(5, 2);
  y.col(0) = randn(5, 1, 8);
  y.col(1) = y.col(0);
  const DenseMatrix g = y.transpose() * y;
  const DenseMatrix r = inv_sqrt_psd(g);
  EXPECT_TRUE(all_finite(r));
  // r^2 inverts g on the clipped spectrum.
  const SymEig e = sym_eig(g);
  const double clip = default_clip(e);
  Vector lam = e.eigenvalues.cwiseMax(clip);
  const DenseMatrix expected = e.eigenvectors * lam.cwiseInverse().asDiagonal() * e.eigenvectors.transpose();
  EXPECT_LT(rel_err(r * r, expected), 1e-8);
}

TEST(Matrix, InvSqrtPsdProperties) {
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix a = randn(7, 4, 30 + t);
    const DenseMatrix s = a.transpose() * a;
    const DenseMatrix r = inv_sqrt_psd(s);
    EXPECT_LT((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GE(sym_eig(r).eigenvalues.minCoeff(), -1e-10);
    EXPECT_LT(rel_err(r * r * s, DenseMatrix::Identity(4, 4)), 1e-8);
  }
}

TEST(Matrix, PolarFixedPointAndScaling) {
  const DenseMatrix q = qr_orthonormalize(randn(8, 3, 4));
  EXPECT_LT((polar_orthonormal(q) - q).norm(), 1e-10);
  EXPECT_LT((polar_orthonormal(2.0 * DenseMatrix::Identity(3, 3)) - DenseMatrix::Identity(3, 3)).norm(), 1e-12);
  const DenseMatrix y = randn(8, 3, 5);
  for (double c : {0.01, 3.0, 1e4}) EXPECT_LT((polar_orthonormal(c * y) - polar_orthonormal(y)).norm(), 1e-10);
  EXPECT_THROW(polar_orthonormal(DenseMatrix::Zero(4, 2)), DegenerateInputError);
}

TEST(Matrix, PolarMatchesSvdOracle) {
  for (int t = 0; t < 10; ++t) {
    const DenseMatrix tall = randn(8, 3, 50 + t);
    EXPECT_LT((polar_orthonormal(tall) - svd_polar(tall)).norm(), 1e-8);
    const DenseMatrix wide = randn(3, 8, 60 + t);
    const DenseMatrix q = polar_orthonormal(wide);
    EXPECT_LT((q - svd_polar(wide)).norm(), 1e-8);
    EXPECT_LT((q * q.transpose() - DenseMatrix::Identity(3, 3)).norm(), 1e-8);
  }
}

TEST(Matrix, PolarRankDeficientStillOrthonormal) {
  DenseMatrix y(6, 3);
  y.col(0) = randn(6, 1, 70);
  y.col(1) = 2.0 * y.col(0);
  y.col(2) = randn(6, 1, 71);
  const DenseMatrix q = polar_orthonormal(y);
  EXPECT_LT((q.transpose() * q - DenseMatrix::Identity(3, 3)).norm(), 1e-8);
}

TEST(Matrix, QrByHand) {
  DenseMatrix y(3, 2);
  y << 1, 1, 0, 1, 0, 0;
  const DenseMatrix q = qr_orthonormalize(y);
  EXPECT_NEAR(q(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(q.col(0).tail(2).norm(), 0.0, 1e-14);
  EXPECT_NEAR(q.col(0).dot(q.col(1)), 0.0, 1e-14);
  EXPECT_NEAR(q.col(1).norm(), 1.0, 1e-14);
  // Largest-magnitude entry of each column is positive.
  EXPECT_NEAR(q(1, 1), 1.0, 1e-14);
}

TEST(Matrix, QrSpanAndDeterminism) {
  const DenseMatrix y = randn(10, 4, 9);
  const DenseMatrix q = qr_orthonormalize(y);
  EXPECT_LT((q.transpose() * q - DenseMatrix::Identity(4, 4)).norm(), 1e-8);
  EXPECT_LT(rel_err(q * (q.transpose() * y), y), 1e-8);
  EXPECT_TRUE(qr_orthonormalize(y) == q);
  for (Index j = 0; j < 4; ++j) {
    Index i = 0;
    q.col(j).cwiseAbs().maxCoeff(&i);
    EXPECT_GT(q(i, j), 0.0);
  }
  const DenseMatrix o = qr_orthonormalize(randn(6, 3, 2));
  EXPECT_LT((qr_orthonormalize(o) - o).norm(), 1e-12);
  EXPECT_THROW(qr_orthonormalize(randn(2, 3, 1)), DimensionError);
}

TEST(Matrix, QrRankDeficientCompletes) {
  DenseMatrix y = randn(7, 3, 11);
  y.col(2) = y.col(0) + y.col(1);
  const DenseMatrix q = qr_orthonormalize(y);
  EXPECT_LT((q.transpose() * q - DenseMatrix::Identity(3, 3)).norm(), 1e-8);
  EXPECT_LT(rel_err(q * (q.transpose() * y), y), 1e-8);
}

TEST(Matrix, FiniteDiffOracle) {
  const DenseMatrix y = randn(4, 3, 12);
  const DenseMatrix x0 = randn(4, 3, 13);
  const auto half_sq = [](const DenseMatrix& v) { return 0.5 * v.squaredNorm(); };
  EXPECT_LT(rel_err(finite_diff_grad(half_sq, y, 1e-5), y), 1e-8);
  const auto fid = [&](const DenseMatrix& v) { return fidelity_loss(v, x0); };
  EXPECT_LT(rel_err(finite_diff_grad(fid, y, 1e-5), y - x0), 1e-8);
  const DenseMatrix r = randn(5, 3, 14);
  EXPECT_LT(rel_err(finite_diff_grad(orth_penalty_raw, r, 1e-5), grad_orth_raw(r)), 1e-5);
  EXPECT_THROW(finite_diff_grad(half_sq, y, 0.0), ConfigError);
}

TEST(Matrix, SymPart) {
  const DenseMatrix a = randn(4, 4, 15);
  const DenseMatrix s = sym(a);
  EXPECT_TRUE(s.isApprox(s.transpose()));
  EXPECT_LT((s - 0.5 * (a + a.transpose())).norm(), 1e-15);
}
