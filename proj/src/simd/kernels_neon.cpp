#include "dyadic/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(__aarch64__)
#define DYADIC_HAVE_NEON 1
#include <arm_neon.h>
#else
#define DYADIC_HAVE_NEON 0
#endif

namespace dyadic::simd {

#if DYADIC_HAVE_NEON
namespace {

// NEON is architectural on AArch64; no runtime probe is needed.
// vmulq/vaddq/vsubq only: vmlaq_f64 may lower to a fused op.

void quadratic_chain(const double* a, const double* b, const double* x,
                     std::size_t n, double right, double* out) {
  if (n == 0) return;
  if (n == 1) {
    out[0] = a[0] * (0.0 * 0.0) - b[0] * (x[0] * right);
    return;
  }
  out[0] = a[0] * (0.0 * 0.0) - b[0] * (x[0] * x[1]);
  std::size_t i = 1;
  for (; i + 2 <= n - 1; i += 2) {
    const float64x2_t xl = vld1q_f64(x + i - 1);
    const float64x2_t xc = vld1q_f64(x + i);
    const float64x2_t xr = vld1q_f64(x + i + 1);
    const float64x2_t gain = vmulq_f64(vld1q_f64(a + i), vmulq_f64(xl, xl));
    const float64x2_t loss = vmulq_f64(vld1q_f64(b + i), vmulq_f64(xc, xr));
    vst1q_f64(out + i, vsubq_f64(gain, loss));
  }
  for (; i + 1 < n; ++i) {
    out[i] = a[i] * (x[i - 1] * x[i - 1]) - b[i] * (x[i] * x[i + 1]);
  }
  const std::size_t last = n - 1;
  out[last] = a[last] * (x[last - 1] * x[last - 1]) - b[last] * (x[last] * right);
}

void linear_combination(double* out, const double* base, double h,
                        const double* coeff, const double* const* stages,
                        std::size_t n_stages, std::size_t n) {
  const float64x2_t vh = vdupq_n_f64(h);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t j = 0; j < n_stages; ++j) {
      if (coeff[j] == 0.0) continue;
      acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(coeff[j]), vld1q_f64(stages[j] + i)));
    }
    const float64x2_t bv = base ? vld1q_f64(base + i) : vdupq_n_f64(0.0);
    vst1q_f64(out + i, vaddq_f64(bv, vmulq_f64(vh, acc)));
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_stages; ++j) {
      if (coeff[j] != 0.0) acc = acc + coeff[j] * stages[j][i];
    }
    const double bv = base ? base[i] : 0.0;
    out[i] = bv + h * acc;
  }
}

double scaled_error_max(const double* err, const double* y0, const double* y1,
                        double rtol, double atol, std::size_t n) {
  const float64x2_t vr = vdupq_n_f64(rtol);
  const float64x2_t va = vdupq_n_f64(atol);
  float64x2_t worst = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t m = vmaxq_f64(vabsq_f64(vld1q_f64(y0 + i)), vabsq_f64(vld1q_f64(y1 + i)));
    const float64x2_t scale = vaddq_f64(va, vmulq_f64(vr, m));
    const float64x2_t r = vdivq_f64(vabsq_f64(vld1q_f64(err + i)), scale);
    const uint64x2_t ordered = vceqq_f64(r, r);
    if ((vgetq_lane_u64(ordered, 0) & vgetq_lane_u64(ordered, 1)) == 0) return HUGE_VAL;
    worst = vmaxq_f64(worst, r);
  }
  double w = std::max(vgetq_lane_f64(worst, 0), vgetq_lane_f64(worst, 1));
  for (; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    const double r = std::fabs(err[i]) / scale;
    if (std::isnan(r)) return HUGE_VAL;
    w = std::max(w, r);
  }
  return w;
}

double max_abs(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double w = std::max(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
  for (; i < n; ++i) w = std::max(w, std::fabs(x[i]));
  return w;
}

void dense_quartic(const double* r, double s, std::size_t n, double* out) {
  const double s1 = 1.0 - s;
  const float64x2_t vs = vdupq_n_f64(s);
  const float64x2_t vs1 = vdupq_n_f64(s1);
  const double* r1 = r;
  const double* r2 = r + n;
  const double* r3 = r + 2 * n;
  const double* r4 = r + 3 * n;
  const double* r5 = r + 4 * n;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vaddq_f64(vld1q_f64(r4 + i), vmulq_f64(vs1, vld1q_f64(r5 + i)));
    v = vaddq_f64(vld1q_f64(r3 + i), vmulq_f64(vs, v));
    v = vaddq_f64(vld1q_f64(r2 + i), vmulq_f64(vs1, v));
    v = vaddq_f64(vld1q_f64(r1 + i), vmulq_f64(vs, v));
    vst1q_f64(out + i, v);
  }
  for (; i < n; ++i) {
    out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
  }
}

const KernelTable kNeonTable{Isa::Neon,          quadratic_chain,
                             linear_combination, scaled_error_max,
                             max_abs,            dense_quartic};

}  // namespace

const KernelTable* detail::neon_table() { return &kNeonTable; }

#else

const KernelTable* detail::neon_table() { return nullptr; }

#endif

}  // namespace dyadic::simd
