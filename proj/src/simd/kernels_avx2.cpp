#include "dyadic/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#define DYADIC_HAVE_AVX2 1
#include <immintrin.h>
#else
#define DYADIC_HAVE_AVX2 0
#endif

namespace dyadic::simd {

#if DYADIC_HAVE_AVX2
namespace {

#define DYADIC_AVX2 __attribute__((target("avx2")))

DYADIC_AVX2 void quadratic_chain(const double* a, const double* b,
                                 const double* x, std::size_t n, double right,
                                 double* out) {
  if (n == 0) return;
  if (n == 1) {
    out[0] = a[0] * (0.0 * 0.0) - b[0] * (x[0] * right);
    return;
  }
  out[0] = a[0] * (0.0 * 0.0) - b[0] * (x[0] * x[1]);
  // interior 1 <= i <= n-2 reads x[i-1], x[i], x[i+1] without padding
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d xl = _mm256_loadu_pd(x + i - 1);
    const __m256d xc = _mm256_loadu_pd(x + i);
    const __m256d xr = _mm256_loadu_pd(x + i + 1);
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d gain = _mm256_mul_pd(va, _mm256_mul_pd(xl, xl));
    const __m256d loss = _mm256_mul_pd(vb, _mm256_mul_pd(xc, xr));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(gain, loss));
  }
  for (; i + 1 < n; ++i) {
    out[i] = a[i] * (x[i - 1] * x[i - 1]) - b[i] * (x[i] * x[i + 1]);
  }
  const std::size_t last = n - 1;
  out[last] = a[last] * (x[last - 1] * x[last - 1]) - b[last] * (x[last] * right);
}

DYADIC_AVX2 void linear_combination(double* out, const double* base, double h,
                                    const double* coeff,
                                    const double* const* stages,
                                    std::size_t n_stages, std::size_t n) {
  const __m256d vh = _mm256_set1_pd(h);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n_stages; ++j) {
      if (coeff[j] == 0.0) continue;
      const __m256d c = _mm256_set1_pd(coeff[j]);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(c, _mm256_loadu_pd(stages[j] + i)));
    }
    const __m256d b = base ? _mm256_loadu_pd(base + i) : _mm256_setzero_pd();
    _mm256_storeu_pd(out + i, _mm256_add_pd(b, _mm256_mul_pd(vh, acc)));
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_stages; ++j) {
      if (coeff[j] != 0.0) acc = acc + coeff[j] * stages[j][i];
    }
    const double b = base ? base[i] : 0.0;
    out[i] = b + h * acc;
  }
}

DYADIC_AVX2 inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

DYADIC_AVX2 double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

DYADIC_AVX2 double scaled_error_max(const double* err, const double* y0,
                                    const double* y1, double rtol, double atol,
                                    std::size_t n) {
  const __m256d vr = _mm256_set1_pd(rtol);
  const __m256d va = _mm256_set1_pd(atol);
  __m256d worst = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = _mm256_max_pd(abs_pd(_mm256_loadu_pd(y0 + i)),
                                    abs_pd(_mm256_loadu_pd(y1 + i)));
    const __m256d scale = _mm256_add_pd(va, _mm256_mul_pd(vr, m));
    const __m256d r = _mm256_div_pd(abs_pd(_mm256_loadu_pd(err + i)), scale);
    if (_mm256_movemask_pd(_mm256_cmp_pd(r, r, _CMP_UNORD_Q)) != 0) return HUGE_VAL;
    worst = _mm256_max_pd(worst, r);
  }
  double w = hmax(worst);
  for (; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    const double r = std::fabs(err[i]) / scale;
    if (std::isnan(r)) return HUGE_VAL;
    w = std::max(w, r);
  }
  return w;
}

DYADIC_AVX2 double max_abs(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(x + i)));
  double w = hmax(m);
  for (; i < n; ++i) w = std::max(w, std::fabs(x[i]));
  return w;
}

DYADIC_AVX2 void dense_quartic(const double* r, double s, std::size_t n,
                               double* out) {
  const double s1 = 1.0 - s;
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vs1 = _mm256_set1_pd(s1);
  const double* r1 = r;
  const double* r2 = r + n;
  const double* r3 = r + 2 * n;
  const double* r4 = r + 3 * n;
  const double* r5 = r + 4 * n;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_add_pd(_mm256_loadu_pd(r4 + i),
                              _mm256_mul_pd(vs1, _mm256_loadu_pd(r5 + i)));
    v = _mm256_add_pd(_mm256_loadu_pd(r3 + i), _mm256_mul_pd(vs, v));
    v = _mm256_add_pd(_mm256_loadu_pd(r2 + i), _mm256_mul_pd(vs1, v));
    v = _mm256_add_pd(_mm256_loadu_pd(r1 + i), _mm256_mul_pd(vs, v));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) {
    out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
  }
}

#undef DYADIC_AVX2

const KernelTable kAvx2Table{Isa::Avx2,          quadratic_chain,
                             linear_combination, scaled_error_max,
                             max_abs,            dense_quartic};

}  // namespace

const KernelTable* detail::avx2_table() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") ? &kAvx2Table : nullptr;
}

#else

const KernelTable* detail::avx2_table() { return nullptr; }

#endif

}  // namespace dyadic::simd
