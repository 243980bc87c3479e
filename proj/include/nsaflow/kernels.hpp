#pragma once

// Elementwise and reduction kernels over contiguous double buffers.
//
// Every kernel has a scalar reference implementation; on x86-64 an AVX2
// variant is selected at runtime when the CPU supports it. Elementwise
// kernels are bit-identical across variants (no FMA contraction). Reductions
// use two 4-lane accumulators in the AVX2 path and therefore agree with
// the scalar path only to rounding.
//
// The environment variable NSAFLOW_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace nsaflow::kernels {

enum class SimdLevel { scalar, avx2 };

struct KernelTable {
  SimdLevel level;
  double (*sum_squares)(const double* x, std::size_t n);
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*abs_sum)(const double* x, std::size_t n);
  // out[i] = a * x[i] + b * y[i]; out may alias x or y.
  void (*axpby)(double a, const double* x, double b, const double* y, double* out, std::size_t n);
  // out[i] = max(x[i], 0); out may alias x.
  void (*clamp_nonneg)(const double* x, double* out, std::size_t n);
  // out[i] = sign(x[i]) * max(|x[i]| - tau, 0); out may alias x.
  void (*soft_threshold)(const double* x, double tau, double* out, std::size_t n);
  // Accumulates sum of min(x,0)^2 and the largest -min(x,0).
  void (*negative_part)(const double* x, std::size_t n, double* sum_sq, double* worst);
  std::size_t (*count_abs_below)(const double* x, std::size_t n, double threshold);
};

/// Table chosen once per process from CPU features and NSAFLOW_SIMD.
const KernelTable& active();

/// Table for a specific level; falls back to scalar when the level is not
/// available on this CPU or build.
const KernelTable& table(SimdLevel level);

bool available(SimdLevel level);

std::string_view name(SimdLevel level);

namespace detail {
const KernelTable& scalar_table();
#if defined(NSAFLOW_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace nsaflow::kernels
