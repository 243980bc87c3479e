#include "nsaflow/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsaflow/errors.hpp"
#include "nsaflow/kernels.hpp"

namespace nsaflow {

namespace {

// Tall inputs whose Gram spectrum spans more than this ratio go through the
// SVD route; beyond it the eigen route loses orthonormality to round-off.
constexpr double kPolarConditionFloor = 1e-6;

DenseMatrix svd_polar(const DenseMatrix& y) {
  Eigen::JacobiSVD<DenseMatrix> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

DenseMatrix from_row_major(Index rows, Index cols, std::span<const double> data) {
  if (rows <= 0 || cols <= 0) {
    throw DimensionError("matrix dimensions must be positive");
  }
  if (static_cast<Index>(data.size()) != rows * cols) {
    throw DimensionError("row-major data has " + std::to_string(data.size()) + " entries, expected " +
                         std::to_string(rows * cols));
  }
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double v = data[static_cast<std::size_t>(i * cols + j)];
      if (!std::isfinite(v)) throw NonFiniteError("non-finite entry at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      m(i, j) = v;
    }
  }
  return m;
}

bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

double squared_frobenius(const DenseMatrix& m) {
  return kernels::active().sum_squares(m.data(), static_cast<std::size_t>(m.size()));
}

double frobenius_norm(const DenseMatrix& m) { return std::sqrt(squared_frobenius(m)); }

double frobenius_dot(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("frobenius_dot: shape mismatch");
  return kernels::active().dot(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

DenseMatrix sym(const DenseMatrix& a) { return 0.5 * (a + a.transpose()); }

SymEig sym_eig(const DenseMatrix& s) {
  if (s.rows() != s.cols()) throw DimensionError("sym_eig: matrix is not square");
  if (s.size() == 0) throw DimensionError("sym_eig: empty matrix");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(sym(s));
  if (solver.info() != Eigen::Success) throw NonFiniteError("sym_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double default_clip(const SymEig& eig) {
  return 1e-8 * std::max(eig.eigenvalues.maxCoeff(), 1.0);
}

DenseMatrix inv_sqrt_psd(const DenseMatrix& s, std::optional<double> clip_eps) {
  const SymEig eig = sym_eig(s);
  const double clip = clip_eps.value_or(default_clip(eig));
  if (!(clip > 0.0)) throw ConfigError("inv_sqrt_psd: clip must be positive");
  const Vector scale = eig.eigenvalues.unaryExpr([clip](double l) { return 1.0 / std::sqrt(std::max(l, clip)); });
  DenseMatrix out = eig.eigenvectors * scale.asDiagonal() * eig.eigenvectors.transpose();
  return sym(out);
}

DenseMatrix polar_orthonormal(const DenseMatrix& y) {
  if (y.size() == 0) throw DimensionError("polar_orthonormal: empty matrix");
  if (squared_frobenius(y) == 0.0) throw DegenerateInputError("polar_orthonormal: all-zero input");
  if (y.rows() < y.cols()) return svd_polar(y);

  const SymEig eig = sym_eig(y.transpose() * y);
  const double top = eig.eigenvalues.maxCoeff();
  if (eig.eigenvalues.minCoeff() <= kPolarConditionFloor * top) return svd_polar(y);
  return y * inv_sqrt_psd(y.transpose() * y, 1e-8 * top);
}

DenseMatrix qr_orthonormalize(const DenseMatrix& y) {
  if (y.rows() < y.cols()) throw DimensionError("qr_orthonormalize: needs rows >= cols");
  if (y.size() == 0) throw DimensionError("qr_orthonormalize: empty matrix");
  Eigen::HouseholderQR<DenseMatrix> qr(y);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(y.rows(), y.cols());
  for (Index j = 0; j < q.cols(); ++j) {
    Index arg = 0;
    q.col(j).cwiseAbs().maxCoeff(&arg);
    if (q(arg, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

DenseMatrix finite_diff_grad(const ScalarField& f, const DenseMatrix& y, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_diff_grad: step must be positive");
  DenseMatrix g(y.rows(), y.cols());
  DenseMatrix probe = y;
  for (Index j = 0; j < y.cols(); ++j) {
    for (Index i = 0; i < y.rows(); ++i) {
      const double orig = probe(i, j);
      probe(i, j) = orig + h;
      const double up = f(probe);
      probe(i, j) = orig - h;
      const double down = f(probe);
      probe(i, j) = orig;
      g(i, j) = (up - down) / (2.0 * h);
    }
  }
  return g;
}

}  // namespace nsaflow
