#include "nsaflow/flow.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "nsaflow/errors.hpp"

namespace nsaflow {

namespace {

constexpr int kProbeRates = 9;
constexpr int kProbeSteps = 5;
constexpr double kFallbackLr = 1e-4;
constexpr double kArmijoC1 = 1e-4;
constexpr int kMaxStrikes = 3;

// The problem as the flow sees it: possibly rescaled inputs plus the
// warmup factors, which stay fixed for the whole run.
struct Problem {
  DenseMatrix y0;
  DenseMatrix x0;
  double scale = 1.0;
  ScaleFactors scales;
  const FlowConfig* cfg = nullptr;

  double energy_of(const DenseMatrix& y) const { return energy(y, x0, cfg->w, cfg->penalty_mode, scales); }

  DenseMatrix gradient(const DenseMatrix& y) const {
    const double w = cfg->w;
    DenseMatrix g = DenseMatrix::Zero(y.rows(), y.cols());
    if (w < 1.0) g += ((1.0 - w) * scales.fidelity) * grad_fidelity(y, x0);
    if (w > 0.0) {
      DenseMatrix go = (w * scales.orthogonality) * grad_orth_term(y, cfg->penalty_mode);
      g += cfg->tangent_projection ? tangent_project(y, go) : go;
    }
    return g;
  }
};

struct StepOutcome {
  DenseMatrix next;
  DenseMatrix grad;
  DenseMatrix update;
};

// gradient -> optimizer step -> retraction -> non-negativity.
std::optional<StepOutcome> pipeline_step(const Problem& pb, const DenseMatrix& y, Optimizer& opt, double lr,
                                         int iteration) {
  StepOutcome out;
  out.grad = pb.gradient(y);
  if (pb.cfg->gradient_hook) pb.cfg->gradient_hook(iteration, out.grad);
  auto update = opt.step(out.grad, lr, y);
  if (!update) return std::nullopt;
  out.update = std::move(*update);
  const DenseMatrix trial = y + out.update;
  if (!all_finite(trial) || frobenius_norm(trial) == 0.0) return std::nullopt;
  out.next = project_nonneg(retract(trial, pb.cfg->w, pb.cfg->retraction), pb.cfg->nonneg);
  if (!all_finite(out.next)) return std::nullopt;
  return out;
}

Problem make_problem(const DenseMatrix& y0, const DenseMatrix& x0, const FlowConfig& cfg) {
  if (y0.size() == 0) throw DimensionError("flow: empty Y0");
  if (y0.rows() != x0.rows() || y0.cols() != x0.cols()) throw DimensionError("flow: Y0 and X0 shapes differ");
  if (!all_finite(y0) || !all_finite(x0)) throw NonFiniteError("flow: non-finite input");

  Problem pb;
  pb.cfg = &cfg;
  if (cfg.normalize && cfg.penalty_mode == PenaltyMode::scale_invariant) {
    double n = frobenius_norm(x0);
    if (n == 0.0) n = frobenius_norm(y0);
    if (n > 0.0) pb.scale = n / std::sqrt(static_cast<double>(y0.cols()));
  }
  pb.x0 = x0 / pb.scale;
  pb.y0 = project_nonneg(y0 / pb.scale, cfg.nonneg);
  if (frobenius_norm(pb.y0) == 0.0) throw DegenerateInputError("flow: Y0 is zero after the non-negativity map");
  pb.scales = init_scale_factors(pb.y0, pb.x0, cfg.penalty_mode, cfg.warmup_iters);
  return pb;
}

double probe_learning_rate(const Problem& pb) {
  const FlowConfig& cfg = *pb.cfg;
  const Optimizer fresh(cfg.optimizer, pb.y0.rows(), pb.y0.cols(), cfg.optimizer_params);
  const double e0 = pb.energy_of(pb.y0);

  double best_lr = kFallbackLr;
  double best_e = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int i = 0; i < kProbeRates; ++i) {
    const double rate = std::pow(10.0, -4.0 + 0.5 * i);
    Optimizer opt = fresh;
    DenseMatrix y = pb.y0;
    bool ok = true;
    for (int s = 0; s < kProbeSteps && ok; ++s) {
      std::optional<StepOutcome> st;
      try {
        st = pipeline_step(pb, y, opt, rate, -1);
      } catch (const DegenerateInputError&) {
        st.reset();
      }
      if (!st) {
        ok = false;
        break;
      }
      if (s == 0) {
        const double e_trial = pb.energy_of(y + st->update);
        if (!(e_trial <= e0 + kArmijoC1 * frobenius_dot(st->grad, st->update))) ok = false;
      }
      y = std::move(st->next);
    }
    if (!ok) continue;
    const double e = pb.energy_of(y);
    if (std::isfinite(e) && e < best_e) {
      best_e = e;
      best_lr = rate;
      found = true;
    }
  }
  return found ? best_lr : kFallbackLr;
}

}  // namespace

void FlowConfig::validate() const {
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("w must lie in [0, 1]");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (warmup_iters < 1) throw ConfigError("warmup_iters must be >= 1");
  if (slope_window < 2) throw ConfigError("slope_window must be >= 2");
  if (!(tol_slope > 0.0) || !(tol_grad > 0.0)) throw ConfigError("tolerances must be positive");
  if (nonneg.kind == NonnegKind::softplus && !(nonneg.beta > 0.0)) throw ConfigError("softplus beta must be positive");
  if (lr_strategy == LrStrategy::fixed) {
    if (!lr) throw ConfigError("fixed learning-rate strategy needs lr");
    if (!(*lr > 0.0) || !std::isfinite(*lr)) throw ConfigError("lr must be positive and finite");
  }
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::slope: return "slope";
    case StopReason::grad_norm: return "grad_norm";
    case StopReason::max_iter: return "max_iter";
    case StopReason::nan_guard: return "nan_guard";
  }
  return "?";
}

std::optional<double> energy_slope(std::span<const double> energies, int window, double first_energy) {
  if (window < 2) throw ConfigError("energy_slope: window must be >= 2");
  if (energies.size() < static_cast<std::size_t>(window)) return std::nullopt;
  const auto tail = energies.last(static_cast<std::size_t>(window));
  const double n = static_cast<double>(window);
  const double x_mean = (n - 1.0) / 2.0;
  double y_mean = 0.0;
  for (double e : tail) y_mean += e;
  y_mean /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int i = 0; i < window; ++i) {
    const double dx = i - x_mean;
    sxy += dx * (tail[static_cast<std::size_t>(i)] - y_mean);
    sxx += dx * dx;
  }
  return (sxy / sxx) / std::max(std::abs(first_energy), 1.0);
}

double estimate_learning_rate(const DenseMatrix& y0, const DenseMatrix& x0, const FlowConfig& cfg) {
  cfg.validate();
  const Problem pb = make_problem(y0, x0, cfg);
  return probe_learning_rate(pb);
}

FlowResult run_nsa_flow(const DenseMatrix& y0, const std::optional<DenseMatrix>& x0_opt, const FlowConfig& cfg) {
  cfg.validate();
  const DenseMatrix& x0_in = x0_opt ? *x0_opt : y0;
  const Problem pb = make_problem(y0, x0_in, cfg);
  const double s2 = pb.scale * pb.scale;

  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  const auto elapsed = [&] {
    return cfg.record_time ? std::chrono::duration<double>(Clock::now() - started).count() : 0.0;
  };

  double lr = cfg.lr_strategy == LrStrategy::fixed ? *cfg.lr : probe_learning_rate(pb);

  FlowResult result;
  result.lr = lr;
  Optimizer opt(cfg.optimizer, pb.y0.rows(), pb.y0.cols(), cfg.optimizer_params);

  DenseMatrix y = pb.y0;
  const double e0 = pb.energy_of(y);
  std::vector<double> energies{e0};
  DenseMatrix best = y;
  double best_e = e0;

  const auto record = [&](int iter, const DenseMatrix& cand, double e, double grad_norm) {
    TraceRecord r;
    r.iter = iter;
    r.time_s = elapsed();
    r.fidelity = s2 * fidelity_loss(cand, pb.x0);
    r.orth_defect = orth_defect_invariant(cand);
    r.energy = e;
    r.grad_norm = grad_norm;
    r.lr = lr;
    r.best_energy = best_e;
    result.traces.push_back(r);
  };
  record(0, y, e0, frobenius_norm(pb.gradient(y)));

  int strikes = 0;
  int it = 0;
  StopReason stop = StopReason::max_iter;
  while (it < cfg.max_iter) {
    ++it;
    std::optional<StepOutcome> st;
    try {
      st = pipeline_step(pb, y, opt, lr, it);
    } catch (const DegenerateInputError&) {
      st.reset();
    }
    double e = std::numeric_limits<double>::quiet_NaN();
    if (st) {
      opt.observe(st->next);
      e = pb.energy_of(opt.averaging() ? opt.average() : st->next);
    }
    if (!st || !std::isfinite(e)) {
      // y still holds the last finite iterate.
      lr *= 0.5;
      if (++strikes >= kMaxStrikes) {
        stop = StopReason::nan_guard;
        break;
      }
      continue;
    }

    y = std::move(st->next);
    const DenseMatrix& cand = opt.averaging() ? opt.average() : y;
    energies.push_back(e);
    if (e < best_e) {
      best_e = e;
      best = cand;
      result.best_iteration = it;
    }
    const double gn = frobenius_norm(st->grad);
    if (it % cfg.record_every == 0) record(it, cand, e, gn);

    if (gn < cfg.tol_grad) {
      stop = StopReason::grad_norm;
      break;
    }
    const auto slope = energy_slope(energies, cfg.slope_window, e0);
    if (slope && std::abs(*slope) < cfg.tol_slope) {
      stop = StopReason::slope;
      break;
    }
  }

  result.iterations = it;
  result.stop_reason = stop;
  result.converged = stop == StopReason::slope || stop == StopReason::grad_norm;
  result.y_best = best * pb.scale;
  result.scales = {pb.scales.fidelity / s2, pb.scales.orthogonality};
  result.energy = best_e;
  result.fidelity = fidelity_loss(result.y_best, x0_in);
  result.orth_defect = orth_defect_invariant(result.y_best);
  result.violation = nonneg_violation(result.y_best);
  return result;
}

}  // namespace nsaflow
