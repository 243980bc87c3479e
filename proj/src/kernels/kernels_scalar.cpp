#include "nsaflow/kernels.hpp"

#include <cmath>

namespace nsaflow::kernels::detail {
namespace {

double sum_squares(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double abs_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = a * x[i];
    const double by = b * y[i];
    out[i] = ax + by;
  }
}

void clamp_nonneg(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void soft_threshold(const double* x, double tau, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::fabs(x[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
  }
}

void negative_part(const double* x, std::size_t n, double* sum_sq, double* worst) {
  double acc = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < 0.0) {
      acc += x[i] * x[i];
      if (-x[i] > w) w = -x[i];
    }
  }
  *sum_sq = acc;
  *worst = w;
}

std::size_t count_abs_below(const double* x, std::size_t n, double threshold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += std::fabs(x[i]) < threshold ? 1 : 0;
  return c;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{SimdLevel::scalar, sum_squares,  squared_distance, dot,
                                 abs_sum,           axpby,        clamp_nonneg,     soft_threshold,
                                 negative_part,     count_abs_below};
  return table;
}

}  // namespace nsaflow::kernels::detail
