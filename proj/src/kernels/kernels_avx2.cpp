// Compiled with -mavx2 only; never called unless the CPU reports AVX2.

#include "nsaflow/kernels.hpp"

#include <immintrin.h>

#include <bit>
#include <cmath>

namespace nsaflow::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

inline __m256d sign_mask() { return _mm256_set1_pd(-0.0); }

double sum_squares(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(x + i);
    const __m256d v1 = _mm256_loadu_pd(x + i + 4);
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(v0, v0));
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(v1, v1));
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double squared_distance(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(d0, d0));
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(d1, d1));
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double abs_sum(const double* x, std::size_t n) {
  const __m256d sm = sign_mask();
  __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_andnot_pd(sm, _mm256_loadu_pd(x + i)));
    a1 = _mm256_add_pd(a1, _mm256_andnot_pd(sm, _mm256_loadu_pd(x + i + 4)));
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

void axpby(double a, const double* x, double b, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(ax, by));
  }
  for (; i < n; ++i) {
    const double ax = a * x[i];
    const double by = b * y[i];
    out[i] = ax + by;
  }
}

void clamp_nonneg(const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  // max_pd returns its second operand on NaN, matching the scalar `x > 0 ? x : 0`.
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void soft_threshold(const double* x, double tau, double* out, std::size_t n) {
  const __m256d sm = sign_mask();
  const __m256d vt = _mm256_set1_pd(tau);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d mag = _mm256_sub_pd(_mm256_andnot_pd(sm, v), vt);
    const __m256d keep = _mm256_cmp_pd(mag, zero, _CMP_GT_OQ);
    const __m256d signed_mag = _mm256_or_pd(mag, _mm256_and_pd(v, sm));
    _mm256_storeu_pd(out + i, _mm256_and_pd(signed_mag, keep));
  }
  for (; i < n; ++i) {
    const double mag = std::fabs(x[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
  }
}

void negative_part(const double* x, std::size_t n, double* sum_sq, double* worst) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  __m256d w = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d neg = _mm256_min_pd(_mm256_loadu_pd(x + i), zero);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(neg, neg));
    w = _mm256_max_pd(w, _mm256_sub_pd(zero, neg));
  }
  double s = hsum(acc);
  double m = hmax(w);
  for (; i < n; ++i) {
    if (x[i] < 0.0) {
      s += x[i] * x[i];
      if (-x[i] > m) m = -x[i];
    }
  }
  *sum_sq = s;
  *worst = m;
}

std::size_t count_abs_below(const double* x, std::size_t n, double threshold) {
  const __m256d sm = sign_mask();
  const __m256d vt = _mm256_set1_pd(threshold);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lt = _mm256_cmp_pd(_mm256_andnot_pd(sm, _mm256_loadu_pd(x + i)), vt, _CMP_LT_OQ);
    c += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(lt))));
  }
  for (; i < n; ++i) c += std::fabs(x[i]) < threshold ? 1 : 0;
  return c;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{SimdLevel::avx2, sum_squares,  squared_distance, dot,
                                 abs_sum,         axpby,        clamp_nonneg,     soft_threshold,
                                 negative_part,   count_abs_below};
  return table;
}

}  // namespace nsaflow::kernels::detail
