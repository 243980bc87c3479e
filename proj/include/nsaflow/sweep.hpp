#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsaflow/flow.hpp"
#include "nsaflow/synthetic.hpp"

namespace nsaflow {

/// Where a sweep's target matrix comes from: a generator or a file.
struct TargetSpec {
  SyntheticKind kind = SyntheticKind::correlated_noise;
  Index rows = 60;
  Index cols = 8;
  double noise = 0.1;
  std::uint64_t seed = 123;
  std::string path;  ///< non-empty: read the target from this file instead
};

struct SweepSpec {
  std::vector<double> w_grid;
  std::vector<std::uint64_t> seeds;
  FlowConfig base;
  TargetSpec target;
  int threads = 0;  ///< 0: hardware concurrency

  /// Grid non-empty, ascending, inside [0, 1]; seeds non-empty.
  void validate() const;
};

struct SweepRow {
  double w = 0.0;
  std::uint64_t seed = 0;
  double fidelity = 0.0;        ///< 1/2 ||Y - X0||_F^2
  double relative_error = 0.0;  ///< ||Y - X0||_F / ||X0||_F
  double orth_defect = 0.0;
  double sparsity = 0.0;
  int iterations = 0;
  double time_s = 0.0;
  StopReason stop_reason = StopReason::max_iter;
};

/// Reads the JSON sweep description (keys: w_grid, seeds, target, flow,
/// threads). Throws ConfigError on bad content, IoError on unreadable files.
SweepSpec parse_sweep_spec(const std::string& json_text);

DenseMatrix sweep_target(const TargetSpec& target);

/// One flow per (w, seed), started from a uniform(0, 1) matrix drawn with
/// that seed. Rows come back ordered by w, then seed, whatever the thread
/// count.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

inline constexpr const char* kSweepHeader = "w,seed,fidelity,relative_error,orth_defect,sparsity,iterations,time_s,stop_reason";
std::string format_sweep(const std::vector<SweepRow>& rows, const std::vector<std::string>& comments = {});

}  // namespace nsaflow
