#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nsaflow/constraints.hpp"
#include "nsaflow/geometry.hpp"
#include "nsaflow/matrix.hpp"
#include "nsaflow/objective.hpp"
#include "nsaflow/optimizer.hpp"

namespace nsaflow {

enum class LrStrategy { fixed, probe };

struct FlowConfig {
  double w = 0.5;
  PenaltyMode penalty_mode = PenaltyMode::scale_invariant;
  RetractionMode retraction{};
  NonnegMode nonneg{};
  OptimizerKind optimizer = OptimizerKind::asgd;
  OptimizerParams optimizer_params{};
  int max_iter = 1000;
  double tol_slope = 1e-6;
  double tol_grad = 1e-8;
  int slope_window = 10;
  int record_every = 1;
  int warmup_iters = 10;
  std::optional<double> lr;
  LrStrategy lr_strategy = LrStrategy::probe;
  bool tangent_projection = true;
  /// Scale-invariant runs work on Y/s, X0/s with s = ||X0||_F / sqrt(k).
  bool normalize = true;
  /// Wall-clock trace timestamps; off gives reproducible trace files.
  bool record_time = true;
  /// Recorded in outputs. The flow itself is deterministic.
  std::uint64_t seed = 0;
  /// Test hook, called on every combined gradient before the step.
  std::function<void(int iteration, DenseMatrix& grad)> gradient_hook;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct TraceRecord {
  int iter = 0;
  double time_s = 0.0;
  double fidelity = 0.0;     ///< 1/2 ||Y - X0||_F^2 in input units
  double orth_defect = 0.0;  ///< scale-invariant defect
  double energy = 0.0;       ///< scaled energy of the candidate
  double grad_norm = 0.0;
  double lr = 0.0;
  double best_energy = 0.0;
};

enum class StopReason { slope, grad_norm, max_iter, nan_guard };
std::string_view stop_reason_name(StopReason reason);

struct FlowResult {
  DenseMatrix y_best;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iter;
  int iterations = 0;
  int best_iteration = 0;
  double lr = 0.0;
  /// Warmup factors expressed for the input units, so that
  /// energy(y_best, X0, w, mode, scales) reproduces `energy`.
  ScaleFactors scales{};
  double fidelity = 0.0;
  double orth_defect = 0.0;
  double energy = 0.0;
  NonnegViolation violation{};
  std::vector<TraceRecord> traces;
};

/// Least-squares slope of the last `window` values against their index,
/// divided by max(|first_energy|, 1). nullopt while fewer values exist.
std::optional<double> energy_slope(std::span<const double> energies, int window, double first_energy);

/// Deterministic probe over 1e-4 ... 1 (9 log-spaced rates): five pipeline
/// steps each; rejects runs that go non-finite or fail sufficient decrease
/// on the first step; returns the rate with the lowest final energy, or
/// 1e-4 when no rate qualifies.
double estimate_learning_rate(const DenseMatrix& y0, const DenseMatrix& x0, const FlowConfig& cfg);

/// Runs the flow. Without X0 the target is Y0.
FlowResult run_nsa_flow(const DenseMatrix& y0, const std::optional<DenseMatrix>& x0, const FlowConfig& cfg);

}  // namespace nsaflow
