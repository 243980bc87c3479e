#pragma once

#include "nsaflow/matrix.hpp"

namespace nsaflow {

enum class RetractionKind { none, soft_polar, polar };

struct RetractionMode {
  RetractionKind kind = RetractionKind::soft_polar;
  /// Rescale the soft-polar output back to the input's Frobenius norm.
  bool preserve_norm = true;
};

/// G - Y sym(Y^T G). A true tangent projector only when Y^T Y = I.
DenseMatrix tangent_project(const DenseMatrix& y, const DenseMatrix& g);

/// Pulls Y toward the Stiefel manifold.
///
///   none        Y unchanged.
///   soft_polar  tall: Y ((1-omega) I + omega (Y^T Y)^{-1/2});
///               wide: (1-omega) Y + omega polar(Y);
///               then optionally rescaled to ||Y||_F.
///   polar       polar(Y), ignoring omega and preserve_norm.
///
/// Throws ConfigError for omega outside [0,1] and DegenerateInputError for a
/// zero Y in the polar modes (omega = 0 is always the identity for soft_polar).
DenseMatrix retract(const DenseMatrix& y, double omega, const RetractionMode& mode);

/// ||Y_new - Q||_F / max(||Y_tilde - Q||_F, eps) with Q = polar(Y_tilde).
double contraction_ratio(const DenseMatrix& y_tilde, const DenseMatrix& y_new);

}  // namespace nsaflow
