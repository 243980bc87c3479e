#pragma once

#include <optional>
#include <string_view>

#include "nsaflow/matrix.hpp"

namespace nsaflow {

enum class NonnegKind { off, clamp, softplus };

struct NonnegMode {
  NonnegKind kind = NonnegKind::clamp;
  double beta = 20.0;  ///< softplus sharpness
};

/// Accepts "off", "clamp", "relu" (alias of clamp) and "softplus".
std::optional<NonnegKind> parse_nonneg_kind(std::string_view text);

/// off: Y. clamp: max(Y, 0). softplus: log(1 + exp(beta y)) / beta, with the
/// asymptotes used beyond |beta y| > 30.
DenseMatrix project_nonneg(const DenseMatrix& y, const NonnegMode& mode);

/// Entrywise sign(z) max(|z| - tau, 0), the prox of tau ||.||_1.
DenseMatrix soft_threshold(const DenseMatrix& z, double tau);

struct NonnegViolation {
  double sum_sq = 0.0;  ///< sum of min(y, 0)^2
  double worst = 0.0;   ///< magnitude of the most negative entry
};

NonnegViolation nonneg_violation(const DenseMatrix& y);

}  // namespace nsaflow
