#include "nsaflow/geometry.hpp"

#include <algorithm>

#include "nsaflow/errors.hpp"
#include "nsaflow/kernels.hpp"

namespace nsaflow {

DenseMatrix tangent_project(const DenseMatrix& y, const DenseMatrix& g) {
  if (y.rows() != g.rows() || y.cols() != g.cols()) throw DimensionError("tangent_project: shape mismatch");
  return g - y * sym(y.transpose() * g);
}

DenseMatrix retract(const DenseMatrix& y, double omega, const RetractionMode& mode) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("retract: omega must lie in [0, 1]");

  switch (mode.kind) {
    case RetractionKind::none:
      return y;
    case RetractionKind::polar:
      return polar_orthonormal(y);
    case RetractionKind::soft_polar:
      break;
  }

  if (omega == 0.0) return y;
  const double in_norm = frobenius_norm(y);
  if (in_norm == 0.0) throw DegenerateInputError("retract: zero matrix");

  DenseMatrix candidate;
  if (y.rows() >= y.cols()) {
    DenseMatrix t = inv_sqrt_psd(y.transpose() * y);
    t *= omega;
    t.diagonal().array() += 1.0 - omega;
    candidate = y * t;
  } else {
    const DenseMatrix q = polar_orthonormal(y);
    candidate.resize(y.rows(), y.cols());
    kernels::active().axpby(1.0 - omega, y.data(), omega, q.data(), candidate.data(),
                            static_cast<std::size_t>(y.size()));
  }

  if (mode.preserve_norm) {
    const double out_norm = frobenius_norm(candidate);
    if (out_norm > 0.0) candidate *= in_norm / out_norm;
  }
  return candidate;
}

double contraction_ratio(const DenseMatrix& y_tilde, const DenseMatrix& y_new) {
  if (y_tilde.rows() != y_new.rows() || y_tilde.cols() != y_new.cols()) {
    throw DimensionError("contraction_ratio: shape mismatch");
  }
  const DenseMatrix q = polar_orthonormal(y_tilde);
  const double before = frobenius_norm(y_tilde - q);
  return frobenius_norm(y_new - q) / std::max(before, 1e-300);
}

}  // namespace nsaflow
