#include "dyadic/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace dyadic::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &detail::kScalarTable;
    case Isa::Avx2: return detail::avx2_table();
    case Isa::Neon: return detail::neon_table();
  }
  return nullptr;
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("DYADIC_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return detail::kScalarTable;
    if (want == "avx2") {
      if (const auto* t = detail::avx2_table()) return *t;
    }
    if (want == "neon") {
      if (const auto* t = detail::neon_table()) return *t;
    }
  }
  if (const auto* t = detail::avx2_table()) return *t;
  if (const auto* t = detail::neon_table()) return *t;
  return detail::kScalarTable;
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace dyadic::simd
