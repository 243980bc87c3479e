#include "nsaflow/constraints.hpp"

#include <cmath>

#include "nsaflow/errors.hpp"
#include "nsaflow/kernels.hpp"

namespace nsaflow {

std::optional<NonnegKind> parse_nonneg_kind(std::string_view text) {
  if (text == "off" || text == "none") return NonnegKind::off;
  if (text == "clamp" || text == "relu") return NonnegKind::clamp;
  if (text == "softplus") return NonnegKind::softplus;
  return std::nullopt;
}

DenseMatrix project_nonneg(const DenseMatrix& y, const NonnegMode& mode) {
  switch (mode.kind) {
    case NonnegKind::off:
      return y;
    case NonnegKind::clamp: {
      DenseMatrix out(y.rows(), y.cols());
      kernels::active().clamp_nonneg(y.data(), out.data(), static_cast<std::size_t>(y.size()));
      return out;
    }
    case NonnegKind::softplus: {
      if (!(mode.beta > 0.0)) throw ConfigError("softplus beta must be positive");
      const double beta = mode.beta;
      return y.unaryExpr([beta](double v) {
        const double z = beta * v;
        if (z > 30.0) return v;
        if (z < -30.0) return 0.0;
        return std::log1p(std::exp(z)) / beta;
      });
    }
  }
  return y;
}

DenseMatrix soft_threshold(const DenseMatrix& z, double tau) {
  if (!(tau >= 0.0)) throw ConfigError("soft_threshold: tau must be non-negative");
  DenseMatrix out(z.rows(), z.cols());
  kernels::active().soft_threshold(z.data(), tau, out.data(), static_cast<std::size_t>(z.size()));
  return out;
}

NonnegViolation nonneg_violation(const DenseMatrix& y) {
  NonnegViolation v;
  kernels::active().negative_part(y.data(), static_cast<std::size_t>(y.size()), &v.sum_sq, &v.worst);
  return v;
}

}  // namespace nsaflow
