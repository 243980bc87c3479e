#include "nsaflow/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "nsaflow/errors.hpp"
#include "nsaflow/flow.hpp"
#include "nsaflow/io.hpp"
#include "nsaflow/spca.hpp"
#include "nsaflow/sweep.hpp"
#include "nsaflow/synthetic.hpp"

namespace nsaflow {

namespace {

// Flow knobs shared by `optimize` and `sweep`.
struct FlowFlags {
  std::string retraction = "soft";
  bool no_preserve_norm = false;
  std::string nonneg = "clamp";
  double beta = 20.0;
  std::string optimizer = "asgd";
  std::string penalty = "invariant";
  int max_iter = 1000;
  double tol = 1e-6;
  double tol_grad = 1e-8;
  double lr = 0.0;
  int warmup = 10;
  int record_every = 1;
  bool no_tangent = false;
  bool no_timing = false;

  void add_to(CLI::App* app) {
    app->add_option("--retraction", retraction, "none, soft or polar")->capture_default_str();
    app->add_flag("--no-preserve-norm", no_preserve_norm, "let the soft retraction change the Frobenius norm");
    app->add_option("--nonneg", nonneg, "off, clamp, relu or softplus")->capture_default_str();
    app->add_option("--beta", beta, "softplus sharpness")->capture_default_str();
    app->add_option("--optimizer", optimizer, "gd, momentum, adam, adagrad, asgd or lars")->capture_default_str();
    app->add_option("--penalty", penalty, "raw or invariant")->capture_default_str();
    app->add_option("--max-iter", max_iter)->capture_default_str();
    app->add_option("--tol", tol, "energy-slope tolerance")->capture_default_str();
    app->add_option("--tol-grad", tol_grad)->capture_default_str();
    app->add_option("--lr", lr, "fixed learning rate (default: probe)");
    app->add_option("--warmup", warmup)->capture_default_str();
    app->add_option("--record-every", record_every)->capture_default_str();
    app->add_flag("--no-tangent", no_tangent, "skip the tangent projection");
    app->add_flag("--no-timing", no_timing, "write time_s = 0 so traces are reproducible");
  }

  FlowConfig config() const {
    FlowConfig cfg;
    if (retraction == "none") cfg.retraction.kind = RetractionKind::none;
    else if (retraction == "soft" || retraction == "soft_polar") cfg.retraction.kind = RetractionKind::soft_polar;
    else if (retraction == "polar") cfg.retraction.kind = RetractionKind::polar;
    else throw ConfigError("unknown retraction '" + retraction + "'");
    cfg.retraction.preserve_norm = !no_preserve_norm;

    const auto nn = parse_nonneg_kind(nonneg);
    if (!nn) throw ConfigError("unknown nonneg mode '" + nonneg + "'");
    cfg.nonneg = {*nn, beta};

    const auto opt = parse_optimizer_kind(optimizer);
    if (!opt) throw ConfigError("unknown optimizer '" + optimizer + "'");
    cfg.optimizer = *opt;

    if (penalty == "raw") cfg.penalty_mode = PenaltyMode::raw;
    else if (penalty == "invariant" || penalty == "scale_invariant") cfg.penalty_mode = PenaltyMode::scale_invariant;
    else throw ConfigError("unknown penalty '" + penalty + "'");

    cfg.max_iter = max_iter;
    cfg.tol_slope = tol;
    cfg.tol_grad = tol_grad;
    cfg.warmup_iters = warmup;
    cfg.record_every = record_every;
    cfg.tangent_projection = !no_tangent;
    cfg.record_time = !no_timing;
    if (lr != 0.0) {
      cfg.lr = lr;
      cfg.lr_strategy = LrStrategy::fixed;
    }
    return cfg;
  }
};

std::string seed_comment(const std::string& command, std::uint64_t seed) {
  return "nsaflow " + command + " seed=" + std::to_string(seed);
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream cell(item);
    T v{};
    if (!(cell >> v) || !(cell >> std::ws).eof()) throw ConfigError(std::string("bad ") + what + " entry '" + item + "'");
    values.push_back(v);
  }
  return values;
}

bool parse_on_off(const std::string& text) {
  if (text == "on" || text == "true" || text == "1" || text == "clamp" || text == "relu") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw ConfigError("expected on or off, got '" + text + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-negative Stiefel approximating flow and sparse PCA"};
  app.require_subcommand(1);

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "approximate a target by a non-negative near-orthogonal matrix");
  std::string input, target, out_path, trace_path;
  double w = 0.5;
  std::uint64_t seed = 0;
  FlowFlags flow_flags;
  opt_cmd->add_option("--input", input, "start matrix Y0")->required();
  opt_cmd->add_option("--target", target, "target X0 (default: Y0)");
  opt_cmd->add_option("--w", w, "orthogonality weight in [0, 1]")->capture_default_str();
  opt_cmd->add_option("--seed", seed)->capture_default_str();
  opt_cmd->add_option("--out", out_path, "result matrix")->required();
  opt_cmd->add_option("--trace", trace_path, "per-iteration trace");
  flow_flags.add_to(opt_cmd);

  // spca
  auto* spca_cmd = app.add_subcommand("spca", "sparse PCA with a basic or flow-based proximal step");
  std::string data_path, loadings_path, metrics_path, prox = "basic", spca_nonneg = "on";
  SpcaConfig spca_cfg;
  spca_cmd->add_option("--data", data_path, "n x p data matrix")->required();
  spca_cmd->add_option("--k", spca_cfg.k)->capture_default_str();
  spca_cmd->add_option("--lambda", spca_cfg.lambda)->capture_default_str();
  spca_cmd->add_option("--prox", prox, "basic or nsa_flow")->capture_default_str();
  spca_cmd->add_option("--w", spca_cfg.w, "inner flow weight")->capture_default_str();
  spca_cmd->add_option("--nonneg", spca_nonneg, "on or off")->capture_default_str();
  spca_cmd->add_option("--max-iter", spca_cfg.max_iter)->capture_default_str();
  spca_cmd->add_option("--tol", spca_cfg.tol)->capture_default_str();
  spca_cmd->add_option("--patience", spca_cfg.patience)->capture_default_str();
  spca_cmd->add_option("--lr-shrink", spca_cfg.lr_shrink)->capture_default_str();
  spca_cmd->add_option("--inner-budget", spca_cfg.inner_budget)->capture_default_str();
  spca_cmd->add_option("--out", loadings_path, "loadings p x k")->required();
  spca_cmd->add_option("--metrics", metrics_path, "metrics record");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "grid of flows over w and seeds");
  std::string spec_path, grid_text, seeds_text = "0", sweep_out, sweep_target_path;
  std::string gen_kind = "correlated_noise";
  Index gen_rows = 60, gen_cols = 8;
  double gen_noise = 0.1;
  std::uint64_t gen_seed = 123;
  int threads = 0;
  FlowFlags sweep_flags;
  sweep_cmd->add_option("--spec", spec_path, "JSON sweep description");
  sweep_cmd->add_option("--grid", grid_text, "comma-separated w values");
  sweep_cmd->add_option("--seeds", seeds_text, "comma-separated seeds")->capture_default_str();
  sweep_cmd->add_option("--target", sweep_target_path, "target matrix file");
  sweep_cmd->add_option("--kind", gen_kind, "generated target kind")->capture_default_str();
  sweep_cmd->add_option("--rows", gen_rows)->capture_default_str();
  sweep_cmd->add_option("--cols", gen_cols)->capture_default_str();
  sweep_cmd->add_option("--noise", gen_noise)->capture_default_str();
  sweep_cmd->add_option("--data-seed", gen_seed)->capture_default_str();
  sweep_cmd->add_option("--threads", threads, "0 = all cores")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "summary table")->required();
  sweep_flags.add_to(sweep_cmd);

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic matrix");
  std::string g_kind, g_out, g_truth;
  Index g_rows = 60, g_cols = 4, g_n = 100, g_support = 8;
  double g_noise = 0.1;
  std::uint64_t g_seed = 0;
  gen_cmd->add_option("--kind", g_kind, "block_nonneg, correlated_noise, toy43, two_factor or nonneg_lowrank")
      ->required();
  gen_cmd->add_option("--rows", g_rows, "p (features)")->capture_default_str();
  gen_cmd->add_option("--cols", g_cols, "k (components)")->capture_default_str();
  gen_cmd->add_option("--n", g_n, "samples for data generators")->capture_default_str();
  gen_cmd->add_option("--support", g_support, "two_factor support size")->capture_default_str();
  gen_cmd->add_option("--noise", g_noise)->capture_default_str();
  gen_cmd->add_option("--seed", g_seed)->capture_default_str();
  gen_cmd->add_option("--out", g_out)->required();
  gen_cmd->add_option("--truth", g_truth, "two_factor ground-truth factors");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*opt_cmd) {
      FlowConfig cfg = flow_flags.config();
      cfg.w = w;
      cfg.seed = seed;
      cfg.validate();
      const DenseMatrix y0 = read_matrix(input);
      std::optional<DenseMatrix> x0;
      if (!target.empty()) x0 = read_matrix(target);
      const FlowResult r = run_nsa_flow(y0, x0, cfg);
      const std::vector<std::string> comments{seed_comment("optimize", seed),
                                              "w=" + format_double(w) + " stop=" +
                                                  std::string(stop_reason_name(r.stop_reason)) +
                                                  " iterations=" + std::to_string(r.iterations)};
      write_matrix(out_path, r.y_best, comments);
      if (!trace_path.empty()) write_text_atomic(trace_path, format_trace(r.traces, {comments.front()}));
      out << "stop=" << stop_reason_name(r.stop_reason) << " iterations=" << r.iterations
          << " fidelity=" << format_double(r.fidelity) << " orth_defect=" << format_double(r.orth_defect)
          << " energy=" << format_double(r.energy) << '\n';
    } else if (*spca_cmd) {
      const auto kind = parse_prox_kind(prox);
      if (!kind) throw ConfigError("unknown prox '" + prox + "'");
      spca_cfg.proximal_type = *kind;
      spca_cfg.nonneg = parse_on_off(spca_nonneg);
      spca_cfg.validate();
      const DenseMatrix x = read_matrix(data_path);
      const SpcaResult r = run_spca(x, spca_cfg);
      const std::string comment = "nsaflow spca k=" + std::to_string(spca_cfg.k) +
                                  " lambda=" + format_double(spca_cfg.lambda) + " prox=" + std::string(prox_name(*kind));
      write_matrix(loadings_path, r.loadings, {comment});
      const std::string record = "explained_variance_ratio,sparsity,orth_residual,energy\n" +
                                 format_double(r.explained_variance_ratio) + ',' + format_double(r.sparsity) + ',' +
                                 format_double(r.orth_residual) + ',' + format_double(r.energy) + '\n';
      if (!metrics_path.empty()) write_text_atomic(metrics_path, "# " + comment + "\n" + record);
      out << record;
    } else if (*sweep_cmd) {
      SweepSpec spec;
      if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw IoError("cannot open " + spec_path);
        std::stringstream buf;
        buf << in.rdbuf();
        spec = parse_sweep_spec(buf.str());
      } else {
        spec.base = sweep_flags.config();
        spec.w_grid = parse_list<double>(grid_text, "grid");
        spec.seeds = parse_list<std::uint64_t>(seeds_text, "seed");
        spec.threads = threads;
        if (!sweep_target_path.empty()) {
          spec.target.path = sweep_target_path;
        } else {
          const auto kind = parse_synthetic_kind(gen_kind);
          if (!kind) throw ConfigError("unknown target kind '" + gen_kind + "'");
          spec.target = {*kind, gen_rows, gen_cols, gen_noise, gen_seed, {}};
        }
      }
      if (sweep_flags.no_timing) spec.base.record_time = false;
      const auto rows = run_sweep(spec);
      std::string seeds_list;
      for (auto s : spec.seeds) seeds_list += (seeds_list.empty() ? "" : ",") + std::to_string(s);
      write_text_atomic(sweep_out, format_sweep(rows, {"nsaflow sweep seeds=" + seeds_list}));
      out << rows.size() << " runs\n";
    } else if (*gen_cmd) {
      const auto kind = parse_synthetic_kind(g_kind);
      if (!kind) throw ConfigError("unknown kind '" + g_kind + "'");
      DenseMatrix m;
      const std::string comment = seed_comment("generate " + g_kind, g_seed);
      switch (*kind) {
        case SyntheticKind::block_nonneg: m = block_nonneg(g_rows, g_cols, g_noise, g_seed); break;
        case SyntheticKind::correlated_noise: m = correlated_noise(g_rows, g_cols, g_noise, g_seed); break;
        case SyntheticKind::toy43: m = toy43(g_noise, g_seed); break;
        case SyntheticKind::nonneg_lowrank: m = nonneg_lowrank(g_n, g_rows, g_cols, g_noise, g_seed); break;
        case SyntheticKind::two_factor: {
          auto d = two_factor(g_n, g_rows, g_support, g_noise, g_seed);
          m = std::move(d.x);
          if (!g_truth.empty()) write_matrix(g_truth, d.factors, {comment});
          break;
        }
      }
      write_matrix(g_out, m, {comment});
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

}  // namespace nsaflow
