#include "nsaflow/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsaflow/errors.hpp"
#include "nsaflow/kernels.hpp"

namespace nsaflow {

namespace {

constexpr double kLossFloor = 1e-12;
constexpr double kNegligibleFraction = 1e-4;

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(where) + ": shape mismatch");
  }
}

DenseMatrix off_diagonal(const DenseMatrix& g) {
  DenseMatrix m = g;
  m.diagonal().setZero();
  return m;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double fidelity_loss(const DenseMatrix& y, const DenseMatrix& x0) {
  require_same_shape(y, x0, "fidelity_loss");
  return 0.5 * kernels::active().squared_distance(y.data(), x0.data(), static_cast<std::size_t>(y.size()));
}

double orth_penalty_raw(const DenseMatrix& y) {
  DenseMatrix g = y.transpose() * y;
  g.diagonal().array() -= 1.0;
  return 0.5 * squared_frobenius(g);
}

double orth_defect_invariant(const DenseMatrix& y) {
  const DenseMatrix g = y.transpose() * y;
  const double trace = g.trace();
  if (!(trace > 0.0)) throw DegenerateInputError("orth_defect_invariant: zero matrix");
  return squared_frobenius(off_diagonal(g)) / (trace * trace);
}

DenseMatrix grad_fidelity(const DenseMatrix& y, const DenseMatrix& x0) {
  require_same_shape(y, x0, "grad_fidelity");
  return y - x0;
}

// Exact derivative of 1/2 ||Y^T Y - I||^2; the often quoted Y (Y^T Y - I) is
// half of it.
DenseMatrix grad_orth_raw(const DenseMatrix& y) {
  DenseMatrix g = y.transpose() * y;
  g.diagonal().array() -= 1.0;
  return 2.0 * (y * g);
}

// d/dY [N / t^2] with N = ||offdiag(G)||^2 and t = tr G = ||Y||^2:
// dN = 4 Y M, dt = 2 Y, so the gradient is 4 Y M / t^2 - 4 N Y / t^3.
DenseMatrix grad_orth_invariant(const DenseMatrix& y) {
  const DenseMatrix g = y.transpose() * y;
  const double t = g.trace();
  if (!(t > 0.0)) throw DegenerateInputError("grad_orth_invariant: zero matrix");
  const DenseMatrix m = off_diagonal(g);
  const double n = squared_frobenius(m);
  const double s = t * t;
  return (4.0 / s) * (y * m) - (4.0 * n * t / (s * s)) * y;
}

double orth_term(const DenseMatrix& y, PenaltyMode mode) {
  return mode == PenaltyMode::raw ? orth_penalty_raw(y) : orth_defect_invariant(y);
}

DenseMatrix grad_orth_term(const DenseMatrix& y, PenaltyMode mode) {
  return mode == PenaltyMode::raw ? grad_orth_raw(y) : grad_orth_invariant(y);
}

double energy(const DenseMatrix& y, const DenseMatrix& x0, double w, PenaltyMode mode, const ScaleFactors& scales) {
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("energy: w must lie in [0, 1]");
  double e = 0.0;
  if (w < 1.0) e += (1.0 - w) * scales.fidelity * fidelity_loss(y, x0);
  if (w > 0.0) e += w * scales.orthogonality * orth_term(y, mode);
  return e;
}

ScaleFactors scale_factors_from_losses(std::span<const double> fidelity, std::span<const double> orth,
                                       double fidelity_reference, double orth_reference) {
  const auto factor = [](double m, double reference) {
    if (!(m > kNegligibleFraction * reference)) return 1.0;
    return 1.0 / std::max(m, kLossFloor);
  };
  return {factor(mean(fidelity), fidelity_reference), factor(mean(orth), orth_reference)};
}

ScaleFactors init_scale_factors(const DenseMatrix& y0, const DenseMatrix& x0, PenaltyMode mode, int warmup_iters) {
  if (warmup_iters < 1) throw ConfigError("init_scale_factors: warmup_iters must be >= 1");
  require_same_shape(y0, x0, "init_scale_factors");

  std::vector<double> fid;
  std::vector<double> orth;
  fid.reserve(static_cast<std::size_t>(warmup_iters));
  orth.reserve(static_cast<std::size_t>(warmup_iters));

  const double y0_norm = frobenius_norm(y0);
  DenseMatrix y = y0;
  for (int t = 0; t < warmup_iters; ++t) {
    fid.push_back(fidelity_loss(y, x0));
    orth.push_back(orth_term(y, mode));
    const DenseMatrix grad = 0.5 * (grad_fidelity(y, x0) + grad_orth_term(y, mode));
    const double rate = 1e-3 * y0_norm / std::max(frobenius_norm(grad), kLossFloor);
    y -= rate * grad;
  }

  double fid_reference = 0.5 * squared_frobenius(x0);
  if (fid_reference <= 0.0) fid_reference = 0.5 * squared_frobenius(y0);
  const double orth_reference = mode == PenaltyMode::raw ? 0.5 * static_cast<double>(y0.cols()) : 1.0;
  return scale_factors_from_losses(fid, orth, std::max(fid_reference, kLossFloor), orth_reference);
}

}  // namespace nsaflow
