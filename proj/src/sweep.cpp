#include "nsaflow/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "nsaflow/errors.hpp"
#include "nsaflow/io.hpp"
#include "nsaflow/spca.hpp"

namespace nsaflow {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void apply_flow_options(const json& j, FlowConfig& cfg) {
  cfg.max_iter = get_or(j, "max_iter", cfg.max_iter);
  cfg.tol_slope = get_or(j, "tol_slope", cfg.tol_slope);
  cfg.tol_grad = get_or(j, "tol_grad", cfg.tol_grad);
  cfg.warmup_iters = get_or(j, "warmup_iters", cfg.warmup_iters);
  cfg.record_every = get_or(j, "record_every", cfg.record_every);
  cfg.tangent_projection = get_or(j, "tangent_projection", cfg.tangent_projection);
  cfg.retraction.preserve_norm = get_or(j, "preserve_norm", cfg.retraction.preserve_norm);
  if (j.contains("lr")) {
    cfg.lr = j.at("lr").get<double>();
    cfg.lr_strategy = LrStrategy::fixed;
  }
  if (j.contains("optimizer")) {
    const auto kind = parse_optimizer_kind(j.at("optimizer").get<std::string>());
    if (!kind) throw ConfigError("sweep: unknown optimizer");
    cfg.optimizer = *kind;
  }
  if (j.contains("nonneg")) {
    const auto kind = parse_nonneg_kind(j.at("nonneg").get<std::string>());
    if (!kind) throw ConfigError("sweep: unknown nonneg mode");
    cfg.nonneg.kind = *kind;
  }
  if (j.contains("retraction")) {
    const auto r = j.at("retraction").get<std::string>();
    if (r == "none") cfg.retraction.kind = RetractionKind::none;
    else if (r == "soft" || r == "soft_polar") cfg.retraction.kind = RetractionKind::soft_polar;
    else if (r == "polar") cfg.retraction.kind = RetractionKind::polar;
    else throw ConfigError("sweep: unknown retraction");
  }
  if (j.contains("penalty")) {
    const auto p = j.at("penalty").get<std::string>();
    if (p == "raw") cfg.penalty_mode = PenaltyMode::raw;
    else if (p == "invariant" || p == "scale_invariant") cfg.penalty_mode = PenaltyMode::scale_invariant;
    else throw ConfigError("sweep: unknown penalty");
  }
}

}  // namespace

void SweepSpec::validate() const {
  if (w_grid.empty()) throw ConfigError("sweep: empty w grid");
  if (seeds.empty()) throw ConfigError("sweep: no seeds");
  for (double w : w_grid) {
    if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("sweep: w outside [0, 1]");
  }
  if (!std::is_sorted(w_grid.begin(), w_grid.end())) throw ConfigError("sweep: w grid must be ascending");
  if (threads < 0) throw ConfigError("sweep: threads must be >= 0");
  base.validate();
}

SweepSpec parse_sweep_spec(const std::string& json_text) {
  SweepSpec spec;
  try {
    const json j = json::parse(json_text);
    spec.w_grid = j.at("w_grid").get<std::vector<double>>();
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    spec.threads = get_or(j, "threads", 0);
    if (j.contains("flow")) apply_flow_options(j.at("flow"), spec.base);
    if (j.contains("target")) {
      const json& t = j.at("target");
      if (t.contains("path")) {
        spec.target.path = t.at("path").get<std::string>();
      } else {
        const auto kind = parse_synthetic_kind(get_or<std::string>(t, "kind", "correlated_noise"));
        if (!kind || *kind == SyntheticKind::two_factor || *kind == SyntheticKind::nonneg_lowrank) {
          throw ConfigError("sweep: target kind must be block_nonneg, correlated_noise or toy43");
        }
        spec.target.kind = *kind;
        spec.target.rows = get_or<Index>(t, "rows", spec.target.rows);
        spec.target.cols = get_or<Index>(t, "cols", spec.target.cols);
        spec.target.noise = get_or(t, "noise", spec.target.noise);
        spec.target.seed = get_or<std::uint64_t>(t, "seed", spec.target.seed);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

DenseMatrix sweep_target(const TargetSpec& target) {
  if (!target.path.empty()) return read_matrix(target.path);
  switch (target.kind) {
    case SyntheticKind::block_nonneg: return block_nonneg(target.rows, target.cols, target.noise, target.seed);
    case SyntheticKind::correlated_noise:
      return correlated_noise(target.rows, target.cols, target.noise, target.seed);
    case SyntheticKind::toy43: return toy43(target.noise, target.seed);
    default: throw ConfigError("sweep: unsupported target kind");
  }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const DenseMatrix x0 = sweep_target(spec.target);
  const double x0_norm = frobenius_norm(x0);

  const std::size_t jobs = spec.w_grid.size() * spec.seeds.size();
  std::vector<SweepRow> rows(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      try {
        const double w = spec.w_grid[job / spec.seeds.size()];
        const std::uint64_t seed = spec.seeds[job % spec.seeds.size()];
        FlowConfig cfg = spec.base;
        cfg.w = w;
        cfg.seed = seed;
        cfg.gradient_hook = nullptr;
        Rng rng(seed);
        const DenseMatrix y0 = rng.uniform_matrix(x0.rows(), x0.cols());
        const auto t0 = std::chrono::steady_clock::now();
        const FlowResult r = run_nsa_flow(y0, x0, cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        SweepRow& row = rows[job];
        row.w = w;
        row.seed = seed;
        row.fidelity = r.fidelity;
        row.relative_error = x0_norm > 0.0 ? frobenius_norm(r.y_best - x0) / x0_norm : 0.0;
        row.orth_defect = r.orth_defect;
        row.sparsity = loading_sparsity(r.y_best);
        row.iterations = r.iterations;
        row.time_s = spec.base.record_time ? secs : 0.0;
        row.stop_reason = r.stop_reason;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::size_t n_threads = spec.threads > 0 ? static_cast<std::size_t>(spec.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, jobs);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string format_sweep(const std::vector<SweepRow>& rows, const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  out += kSweepHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_double(r.w) + ',' + std::to_string(r.seed) + ',' + format_double(r.fidelity) + ',' +
           format_double(r.relative_error) + ',' + format_double(r.orth_defect) + ',' + format_double(r.sparsity) +
           ',' + std::to_string(r.iterations) + ',' + format_double(r.time_s) + ',' +
           std::string(stop_reason_name(r.stop_reason)) + '\n';
  }
  return out;
}

}  // namespace nsaflow
