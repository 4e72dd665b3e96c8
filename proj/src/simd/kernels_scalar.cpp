#include "dyadic/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace dyadic::simd {
namespace {

void quadratic_chain(const double* a, const double* b, const double* x,
                     std::size_t n, double right, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i == 0 ? 0.0 : x[i - 1];
    const double next = i + 1 == n ? right : x[i + 1];
    out[i] = a[i] * (left * left) - b[i] * (x[i] * next);
  }
}

void linear_combination(double* out, const double* base, double h,
                        const double* coeff, const double* const* stages,
                        std::size_t n_stages, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_stages; ++j) {
      if (coeff[j] != 0.0) acc = acc + coeff[j] * stages[j][i];
    }
    const double b = base ? base[i] : 0.0;
    out[i] = b + h * acc;
  }
}

double scaled_error_max(const double* err, const double* y0, const double* y1,
                        double rtol, double atol, std::size_t n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = atol + rtol * std::max(std::fabs(y0[i]), std::fabs(y1[i]));
    const double r = std::fabs(err[i]) / scale;
    if (std::isnan(r)) return HUGE_VAL;
    worst = std::max(worst, r);
  }
  return worst;
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void dense_quartic(const double* r, double s, std::size_t n, double* out) {
  const double s1 = 1.0 - s;
  const double* r1 = r;
  const double* r2 = r + n;
  const double* r3 = r + 2 * n;
  const double* r4 = r + 3 * n;
  const double* r5 = r + 4 * n;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
  }
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Isa::Scalar,       quadratic_chain,
                               linear_combination, scaled_error_max,
                               max_abs,           dense_quartic};
}  // namespace detail

}  // namespace dyadic::simd
