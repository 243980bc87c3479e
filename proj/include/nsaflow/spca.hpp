#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "nsaflow/matrix.hpp"

namespace nsaflow {

enum class ProxKind { basic, nsa_flow };

std::optional<ProxKind> parse_prox_kind(std::string_view text);
std::string_view prox_name(ProxKind kind);

struct SpcaConfig {
  int k = 2;
  double lambda = 0.1;
  ProxKind proximal_type = ProxKind::basic;
  /// Inner flow weight. Near 0.5 the flow prox keeps its start point on
  /// overlapping non-negative loadings, so the default sits higher.
  double w = 0.8;
  bool nonneg = true;
  int max_iter = 200;
  double tol = 1e-6;
  int patience = 10;
  double lr_shrink = 0.5;
  int inner_budget = 100;
  /// Initial step; defaults to n / lambda_max(S), the inverse Lipschitz
  /// constant of the smooth term.
  std::optional<double> alpha0;
  double armijo_shrink = 0.5;
  double armijo_c1 = 1e-4;
  int armijo_max_backtracks = 30;

  void validate() const;
};

struct SpcaResult {
  DenseMatrix loadings;  ///< p x k
  double explained_variance_ratio = 0.0;
  double sparsity = 0.0;
  double orth_residual = 0.0;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> energy_trace;
};

/// Subtracts column means. Throws DimensionError for fewer than two rows.
DenseMatrix center_columns(const DenseMatrix& x);

/// f(Y) = -tr(Y^T S Y) / (2n).
double spca_smooth_value(const DenseMatrix& y, const DenseMatrix& s, Index n);
/// -(1/n) S Y.
DenseMatrix spca_smooth_grad(const DenseMatrix& y, const DenseMatrix& s, Index n);

using MatrixFunction = std::function<double(const DenseMatrix&)>;

/// Backtracking along `direction` from alpha0: the first alpha0 * shrink^j
/// with f(Y + alpha d) <= f(Y) + c1 alpha <grad, d>. A non-descent direction,
/// or no acceptance within max_backtracks, yields alpha0 * shrink^max_backtracks.
double armijo_search(const MatrixFunction& f, const DenseMatrix& y, const DenseMatrix& grad,
                     const DenseMatrix& direction, double alpha0, double shrink = 0.5, double c1 = 1e-4,
                     int max_backtracks = 30);

double armijo_search(const DenseMatrix& y, const DenseMatrix& s, Index n, const DenseMatrix& direction,
                     double alpha0, double shrink = 0.5, double c1 = 1e-4, int max_backtracks = 30);

/// Soft-threshold by tau, then clamp when nonneg.
DenseMatrix spca_prox_basic(const DenseMatrix& z, double tau, bool nonneg);

/// Inner flow towards Z with weight w, started at Z, for `budget` iterations.
DenseMatrix spca_prox_nsaflow(const DenseMatrix& z, double w, int budget, bool nonneg = true);

/// f(Y) + lambda ||Y||_1.
double spca_energy(const DenseMatrix& y, const DenseMatrix& s, Index n, double lambda);

/// Fraction of entries with |y| < 1e-8.
double loading_sparsity(const DenseMatrix& y);

SpcaResult run_spca(const DenseMatrix& x, const SpcaConfig& cfg);

}  // namespace nsaflow
