#pragma once

// Composite energy: (1-w) * c_fid * fidelity + w * c_orth * orthogonality.

#include <span>

#include "nsaflow/matrix.hpp"

namespace nsaflow {

enum class PenaltyMode {
  raw,              ///< 1/2 ||Y^T Y - I||_F^2
  scale_invariant,  ///< sum_{i!=j} G_ij^2 / (tr G)^2 with G = Y^T Y
};

/// Reciprocal warmup magnitudes of the two loss terms.
struct ScaleFactors {
  double fidelity = 1.0;
  double orthogonality = 1.0;
};

/// 1/2 ||Y - X0||_F^2.
double fidelity_loss(const DenseMatrix& y, const DenseMatrix& x0);
/// 1/2 ||Y^T Y - I||_F^2.
double orth_penalty_raw(const DenseMatrix& y);
/// Off-diagonal Gram energy over squared trace; zero iff the columns are
/// mutually orthogonal, unchanged under Y -> cY. Throws DegenerateInputError
/// for a zero matrix.
double orth_defect_invariant(const DenseMatrix& y);

DenseMatrix grad_fidelity(const DenseMatrix& y, const DenseMatrix& x0);
DenseMatrix grad_orth_raw(const DenseMatrix& y);
DenseMatrix grad_orth_invariant(const DenseMatrix& y);

double orth_term(const DenseMatrix& y, PenaltyMode mode);
DenseMatrix grad_orth_term(const DenseMatrix& y, PenaltyMode mode);

double energy(const DenseMatrix& y, const DenseMatrix& x0, double w, PenaltyMode mode, const ScaleFactors& scales);

/// Reciprocal mean losses, with the "~0" fallback: a term whose mean is at
/// most 1e-4 of its reference magnitude gets factor 1.
ScaleFactors scale_factors_from_losses(std::span<const double> fidelity, std::span<const double> orth,
                                       double fidelity_reference, double orth_reference);

/// Runs `warmup_iters` small gradient-descent probe steps from Y0 on the
/// equally weighted, unscaled energy and derives ScaleFactors from the
/// recorded losses. Probe rate: 1e-3 * ||Y0||_F / ||grad||_F.
ScaleFactors init_scale_factors(const DenseMatrix& y0, const DenseMatrix& x0, PenaltyMode mode, int warmup_iters);

}  // namespace nsaflow
