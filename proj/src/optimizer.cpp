#include "nsaflow/optimizer.hpp"

#include <cmath>

#include "nsaflow/errors.hpp"

namespace nsaflow {

std::optional<OptimizerKind> parse_optimizer_kind(std::string_view text) {
  if (text == "gd") return OptimizerKind::gd;
  if (text == "momentum") return OptimizerKind::momentum;
  if (text == "adam") return OptimizerKind::adam;
  if (text == "adagrad") return OptimizerKind::adagrad;
  if (text == "asgd") return OptimizerKind::asgd;
  if (text == "lars") return OptimizerKind::lars;
  return std::nullopt;
}

std::string_view optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::gd: return "gd";
    case OptimizerKind::momentum: return "momentum";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::adagrad: return "adagrad";
    case OptimizerKind::asgd: return "asgd";
    case OptimizerKind::lars: return "lars";
  }
  return "?";
}

Optimizer::Optimizer(OptimizerKind kind, Index rows, Index cols, OptimizerParams params)
    : kind_(kind), params_(params) {
  if (rows < 1 || cols < 1) throw DimensionError("optimizer: empty shape");
  if (!(params_.momentum >= 0.0 && params_.momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(params_.adam_beta1 >= 0.0 && params_.adam_beta1 < 1.0) ||
      !(params_.adam_beta2 >= 0.0 && params_.adam_beta2 < 1.0) || !(params_.adam_eps > 0.0)) {
    throw ConfigError("adam hyperparameters out of range");
  }
  if (!(params_.lars_trust > 0.0)) throw ConfigError("lars trust must be positive");
  if (params_.asgd_start < 0) throw ConfigError("asgd start must be >= 0");
  if (kind_ == OptimizerKind::momentum || kind_ == OptimizerKind::adam) m_ = DenseMatrix::Zero(rows, cols);
  if (kind_ == OptimizerKind::adam || kind_ == OptimizerKind::adagrad) v_ = DenseMatrix::Zero(rows, cols);
}

std::optional<DenseMatrix> Optimizer::step(const DenseMatrix& grad, double lr, const DenseMatrix& current) {
  if (!all_finite(grad)) return std::nullopt;
  ++t_;
  DenseMatrix update;
  switch (kind_) {
    case OptimizerKind::gd:
    case OptimizerKind::asgd:
      update = -lr * grad;
      break;
    case OptimizerKind::momentum:
      m_ = params_.momentum * m_ + grad;
      update = -lr * m_;
      break;
    case OptimizerKind::adam: {
      const double b1 = params_.adam_beta1;
      const double b2 = params_.adam_beta2;
      m_ = b1 * m_ + (1.0 - b1) * grad;
      v_ = b2 * v_ + (1.0 - b2) * grad.cwiseProduct(grad);
      const double c1 = 1.0 - std::pow(b1, t_);
      const double c2 = 1.0 - std::pow(b2, t_);
      const double eps = params_.adam_eps;
      update = -lr * (m_ / c1).binaryExpr(v_ / c2, [eps](double m, double v) { return m / (std::sqrt(v) + eps); });
      break;
    }
    case OptimizerKind::adagrad: {
      v_ += grad.cwiseProduct(grad);
      const double eps = params_.adagrad_eps;
      update = -lr * grad.binaryExpr(v_, [eps](double g, double v) { return g / (std::sqrt(v) + eps); });
      break;
    }
    case OptimizerKind::lars: {
      const double gn = frobenius_norm(grad);
      const double yn = frobenius_norm(current);
      const double trust = (gn > 0.0 && yn > 0.0) ? params_.lars_trust * yn / gn : 1.0;
      update = -(lr * trust) * grad;
      break;
    }
  }
  if (!all_finite(update)) return std::nullopt;
  return update;
}

void Optimizer::observe(const DenseMatrix& iterate) {
  if (kind_ != OptimizerKind::asgd || t_ <= params_.asgd_start) return;
  ++averaged_;
  if (averaged_ == 1) {
    average_ = iterate;
  } else {
    average_ += (iterate - average_) / static_cast<double>(averaged_);
  }
}

}  // namespace nsaflow
