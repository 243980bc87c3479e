#pragma once

// Dense linear-algebra building blocks shared by every other module.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>

namespace nsaflow {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Builds a matrix from row-major data. Throws DimensionError when the data
/// length does not match or a dimension is zero, NonFiniteError on NaN/Inf.
DenseMatrix from_row_major(Index rows, Index cols, std::span<const double> data);

bool all_finite(const DenseMatrix& m);

double frobenius_norm(const DenseMatrix& m);
double squared_frobenius(const DenseMatrix& m);
/// Frobenius inner product <a, b>.
double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b);

/// Eigen-decomposition of a symmetric matrix; eigenvalues ascending,
/// eigenvectors as orthonormal columns.
struct SymEig {
  Vector eigenvalues;
  DenseMatrix eigenvectors;
};

/// The input is symmetrized as (S + S^T)/2 before factoring.
SymEig sym_eig(const DenseMatrix& s);

/// Default clip for inv_sqrt_psd: 1e-8 * max(lambda_max, 1).
double default_clip(const SymEig& eig);

/// V * diag(max(lambda, clip))^{-1/2} * V^T. Without an explicit clip the
/// relative default_clip is used.
DenseMatrix inv_sqrt_psd(const DenseMatrix& s, std::optional<double> clip_eps = std::nullopt);

/// Nearest matrix with orthonormal columns (tall) or rows (wide).
///
/// Tall, well-conditioned inputs go through Y (Y^T Y)^{-1/2}; wide or
/// rank-deficient inputs use the thin SVD factor U V^T. Throws
/// DegenerateInputError for an all-zero input.
DenseMatrix polar_orthonormal(const DenseMatrix& y);

/// Householder QR, thin Q with each column's largest-magnitude entry made
/// positive. Requires rows >= cols. Span(Q) contains span(Y) even when Y is
/// rank deficient.
DenseMatrix qr_orthonormalize(const DenseMatrix& y);

using ScalarField = std::function<double(const DenseMatrix&)>;

/// Central-difference gradient, one entry at a time.
DenseMatrix finite_diff_grad(const ScalarField& f, const DenseMatrix& y, double h);

/// Symmetric part (A + A^T)/2.
DenseMatrix sym(const DenseMatrix& a);

}  // namespace nsaflow
