#include <cstdlib>
#include <string_view>

#include "sgad/field_kernels.hpp"

namespace sgad::simd {

#if defined(SGAD_HAVE_AVX2)
const KernelTable& avx2_kernel_table() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(SGAD_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* env = std::getenv("SGAD_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace sgad::simd
