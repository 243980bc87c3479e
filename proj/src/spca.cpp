#include "nsaflow/spca.hpp"

#include <cmath>
#include <limits>

#include "nsaflow/constraints.hpp"
#include "nsaflow/errors.hpp"
#include "nsaflow/flow.hpp"
#include "nsaflow/kernels.hpp"
#include "nsaflow/objective.hpp"

namespace nsaflow {

namespace {

constexpr double kZeroLoading = 1e-8;

double abs_sum(const DenseMatrix& y) {
  return kernels::active().abs_sum(y.data(), static_cast<std::size_t>(y.size()));
}

DenseMatrix normalize_columns(DenseMatrix y) {
  for (Index j = 0; j < y.cols(); ++j) {
    const double n = y.col(j).norm();
    if (n > 0.0) y.col(j) /= n;
  }
  return y;
}

void sign_fix_columns(DenseMatrix& y) {
  for (Index j = 0; j < y.cols(); ++j) {
    Index i = 0;
    y.col(j).cwiseAbs().maxCoeff(&i);
    if (y(i, j) < 0.0) y.col(j) = -y.col(j);
  }
}

}  // namespace

std::optional<ProxKind> parse_prox_kind(std::string_view text) {
  if (text == "basic") return ProxKind::basic;
  if (text == "nsa_flow" || text == "nsaflow") return ProxKind::nsa_flow;
  return std::nullopt;
}

std::string_view prox_name(ProxKind kind) { return kind == ProxKind::basic ? "basic" : "nsa_flow"; }

void SpcaConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("w must lie in [0, 1]");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (!(lr_shrink > 0.0 && lr_shrink < 1.0)) throw ConfigError("lr_shrink must lie in (0, 1)");
  if (inner_budget < 1) throw ConfigError("inner budget must be >= 1");
  if (alpha0 && !(*alpha0 > 0.0)) throw ConfigError("alpha0 must be positive");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) throw ConfigError("armijo shrink must lie in (0, 1)");
  if (armijo_max_backtracks < 0) throw ConfigError("armijo backtracks must be >= 0");
}

DenseMatrix center_columns(const DenseMatrix& x) {
  if (x.rows() < 2) throw DimensionError("center_columns: need at least two rows");
  return x.rowwise() - x.colwise().mean();
}

double spca_smooth_value(const DenseMatrix& y, const DenseMatrix& s, Index n) {
  if (s.rows() != y.rows() || s.cols() != y.rows()) throw DimensionError("spca: S must be p x p");
  return -(y.transpose() * s * y).trace() / (2.0 * static_cast<double>(n));
}

DenseMatrix spca_smooth_grad(const DenseMatrix& y, const DenseMatrix& s, Index n) {
  if (s.rows() != y.rows() || s.cols() != y.rows()) throw DimensionError("spca: S must be p x p");
  return -(s * y) / static_cast<double>(n);
}

double armijo_search(const MatrixFunction& f, const DenseMatrix& y, const DenseMatrix& grad,
                     const DenseMatrix& direction, double alpha0, double shrink, double c1, int max_backtracks) {
  const double floor_alpha = alpha0 * std::pow(shrink, max_backtracks);
  const double slope = frobenius_dot(grad, direction);
  if (!(slope < 0.0)) return floor_alpha;
  const double fy = f(y);
  double alpha = alpha0;
  for (int j = 0; j <= max_backtracks; ++j) {
    const double trial = f(y + alpha * direction);
    if (trial <= fy + c1 * alpha * slope) return alpha;
    alpha *= shrink;
  }
  return floor_alpha;
}

double armijo_search(const DenseMatrix& y, const DenseMatrix& s, Index n, const DenseMatrix& direction,
                     double alpha0, double shrink, double c1, int max_backtracks) {
  const auto f = [&](const DenseMatrix& v) { return spca_smooth_value(v, s, n); };
  return armijo_search(f, y, spca_smooth_grad(y, s, n), direction, alpha0, shrink, c1, max_backtracks);
}

DenseMatrix spca_prox_basic(const DenseMatrix& z, double tau, bool nonneg) {
  DenseMatrix out = soft_threshold(z, tau);
  if (nonneg) out = project_nonneg(out, {NonnegKind::clamp});
  return out;
}

DenseMatrix spca_prox_nsaflow(const DenseMatrix& z, double w, int budget, bool nonneg) {
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("spca_prox_nsaflow: w must lie in [0, 1]");
  FlowConfig cfg;
  cfg.w = w;
  cfg.max_iter = budget;
  cfg.nonneg.kind = nonneg ? NonnegKind::clamp : NonnegKind::off;
  cfg.record_time = false;
  // Nothing left to decorrelate once the non-negativity map empties Z.
  const DenseMatrix start = project_nonneg(z, cfg.nonneg);
  if (frobenius_norm(start) == 0.0) return start;
  return run_nsa_flow(z, z, cfg).y_best;
}

double spca_energy(const DenseMatrix& y, const DenseMatrix& s, Index n, double lambda) {
  return spca_smooth_value(y, s, n) + lambda * abs_sum(y);
}

double loading_sparsity(const DenseMatrix& y) {
  if (y.size() == 0) return 0.0;
  const std::size_t zeros =
      kernels::active().count_abs_below(y.data(), static_cast<std::size_t>(y.size()), kZeroLoading);
  return static_cast<double>(zeros) / static_cast<double>(y.size());
}

SpcaResult run_spca(const DenseMatrix& x, const SpcaConfig& cfg) {
  cfg.validate();
  if (!all_finite(x)) throw NonFiniteError("spca: non-finite data");
  const Index n = x.rows();
  const Index p = x.cols();
  if (cfg.k > std::min(n, p)) throw DimensionError("spca: k exceeds min(n, p)");

  // S = Xc^T Xc is never formed; products go through Xc so wide data
  // (thousands of genes) stays cheap.
  const DenseMatrix xc = center_columns(x);
  const double dn = static_cast<double>(n);
  const double total_variance = squared_frobenius(xc);
  const auto smooth = [&](const DenseMatrix& y) { return -squared_frobenius(xc * y) / (2.0 * dn); };
  const auto smooth_grad = [&](const DenseMatrix& y) -> DenseMatrix { return -(xc.transpose() * (xc * y)) / dn; };
  const auto total_energy = [&](const DenseMatrix& y) { return smooth(y) + cfg.lambda * abs_sum(y); };

  Eigen::BDCSVD<DenseMatrix> svd(xc, Eigen::ComputeThinV);
  DenseMatrix y = svd.matrixV().leftCols(cfg.k);
  sign_fix_columns(y);

  const double sigma_max = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  double alpha0 = cfg.alpha0 ? *cfg.alpha0 : (sigma_max > 0.0 ? dn / (sigma_max * sigma_max) : 1.0);

  SpcaResult result;
  double best_e = std::numeric_limits<double>::infinity();
  DenseMatrix best = y;
  std::optional<double> prev_e;
  DenseMatrix prev_y = y;
  int bad = 0;
  int it = 0;
  while (it < cfg.max_iter) {
    ++it;
    if (cfg.proximal_type == ProxKind::basic) y = qr_orthonormalize(y);
    const DenseMatrix g = smooth_grad(y);
    const DenseMatrix dir = -g;
    const double alpha = armijo_search(smooth, y, g, dir, alpha0, cfg.armijo_shrink, cfg.armijo_c1,
                                       cfg.armijo_max_backtracks);
    const DenseMatrix z = y + alpha * dir;

    DenseMatrix next;
    if (cfg.proximal_type == ProxKind::basic) {
      next = spca_prox_basic(z, alpha * cfg.lambda, cfg.nonneg);
    } else {
      next = spca_prox_nsaflow(soft_threshold(z, alpha * cfg.lambda), cfg.w, cfg.inner_budget, cfg.nonneg);
    }
    next = normalize_columns(std::move(next));

    const double e = total_energy(next);
    result.energy_trace.push_back(e);
    if (e < best_e - 1e-12) {
      best_e = e;
      best = next;
      bad = 0;
    } else if (++bad >= cfg.patience) {
      alpha0 *= cfg.lr_shrink;
      bad = 0;
    }

    const double de = prev_e ? std::abs(e - *prev_e) / std::max(std::abs(e), 1.0)
                             : std::numeric_limits<double>::infinity();
    const double dy = frobenius_norm(next - prev_y);
    prev_e = e;
    prev_y = next;
    y = std::move(next);
    if (de < cfg.tol && dy < cfg.tol && dy / alpha < cfg.tol) {
      result.converged = true;
      break;
    }
  }

  result.iterations = it;
  result.loadings = best;
  result.energy = best_e;
  result.sparsity = loading_sparsity(best);
  if (frobenius_norm(best) > 0.0) {
    const DenseMatrix q = qr_orthonormalize(best);
    result.explained_variance_ratio = total_variance > 0.0 ? squared_frobenius(xc * q) / total_variance : 0.0;
    result.orth_residual = orth_defect_invariant(best);
  }
  return result;
}

}  // namespace nsaflow
