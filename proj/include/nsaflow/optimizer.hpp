#pragma once

#include <optional>
#include <string_view>

#include "nsaflow/matrix.hpp"

namespace nsaflow {

enum class OptimizerKind { gd, momentum, adam, adagrad, asgd, lars };

std::optional<OptimizerKind> parse_optimizer_kind(std::string_view text);
std::string_view optimizer_name(OptimizerKind kind);

struct OptimizerParams {
  double momentum = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double adagrad_eps = 1e-10;
  double lars_trust = 0.001;
  int asgd_start = 100;  ///< iteration at which Polyak averaging begins
};

/// First-order update rules. Each instance owns the state for one run and is
/// cheap to copy, which the learning-rate probe relies on.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, Index rows, Index cols, OptimizerParams params = {});

  /// Additive update for the current gradient (already a descent direction
  /// up to sign), or nullopt when the gradient or the update is non-finite.
  /// `current` is the iterate the gradient was taken at (used by LARS).
  std::optional<DenseMatrix> step(const DenseMatrix& grad, double lr, const DenseMatrix& current);

  /// Feeds the post-step iterate to the ASGD running average. No-op for the
  /// other kinds and before the averaging start.
  void observe(const DenseMatrix& iterate);

  bool averaging() const { return averaged_ > 0; }
  const DenseMatrix& average() const { return average_; }
  OptimizerKind kind() const { return kind_; }
  int steps() const { return t_; }

 private:
  OptimizerKind kind_;
  OptimizerParams params_;
  int t_ = 0;
  DenseMatrix m_;
  DenseMatrix v_;
  DenseMatrix average_;
  int averaged_ = 0;
};

}  // namespace nsaflow
