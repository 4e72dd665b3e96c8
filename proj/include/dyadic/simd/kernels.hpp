#pragma once
// Data-parallel inner loops of the simulator.
//
// Every kernel has a scalar reference implementation and optional SIMD
// variants (AVX2 on x86-64, NEON on AArch64). A variant is selected once at
// startup from the CPU feature flags; DYADIC_SIMD=scalar forces the reference
// path. All variants evaluate the same arithmetic expression tree in the same
// order without fused multiply-add, so results are bitwise identical to the
// scalar path. tests/test_kernels.cpp enforces this.

#include <cstddef>
#include <span>
#include <string_view>

namespace dyadic::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // out[i] = a[i] * x[i-1]^2 - b[i] * x[i] * x[i+1]  for 0 <= i < n,
  // with x[-1] = 0 and x[n] = right.
  void (*quadratic_chain)(const double* a, const double* b, const double* x,
                          std::size_t n, double right, double* out);

  // out = base + h * sum_j coeff[j] * stage[j]; base may be null (treated as 0).
  // Terms with coeff[j] == 0 are skipped identically on every path.
  void (*linear_combination)(double* out, const double* base, double h,
                             const double* coeff, const double* const* stages,
                             std::size_t n_stages, std::size_t n);

  // max_i |err[i]| / (atol + rtol * max(|y0[i]|, |y1[i]|))
  double (*scaled_error_max)(const double* err, const double* y0,
                             const double* y1, double rtol, double atol,
                             std::size_t n);

  double (*max_abs)(const double* x, std::size_t n);

  // Quartic continuous extension in nested form:
  //   out = r1 + s (r2 + (1-s)(r3 + s (r4 + (1-s) r5)))
  // where r holds the five coefficient vectors back to back (5n doubles).
  void (*dense_quartic)(const double* r, double s, std::size_t n, double* out);
};

// Table chosen for this process (CPU detection + DYADIC_SIMD override).
const KernelTable& active();

// A specific table; returns nullptr if the ISA is not compiled in or the CPU
// does not support it.
const KernelTable* table_for(Isa isa);

namespace detail {
extern const KernelTable kScalarTable;
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace dyadic::simd
