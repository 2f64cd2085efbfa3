#include <cstdlib>
#include <stdexcept>
#include <string>

#include "skewirt/kernels.hpp"

namespace skewirt::kernels {

#ifdef SKEWIRT_HAVE_AVX2
const KernelSet& avx2_kernel_set();
#endif

const KernelSet* avx2_kernels() {
#ifdef SKEWIRT_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_set() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& active_kernels() {
  static const KernelSet& chosen = [] () -> const KernelSet& {
    const char* forced = std::getenv("SKEWIRT_KERNEL");
    if (forced != nullptr && *forced != '\0') return kernels_by_name(forced);
    if (const KernelSet* v = avx2_kernels()) return *v;
    return scalar_kernels();
  }();
  return chosen;
}

const KernelSet& kernels_by_name(std::string_view name) {
  if (name == "scalar") return scalar_kernels();
  if (name == "avx2") {
    if (const KernelSet* v = avx2_kernels()) return *v;
    throw std::invalid_argument("avx2 kernels unavailable on this build or CPU");
  }
  if (name == "auto") {
    if (const KernelSet* v = avx2_kernels()) return *v;
    return scalar_kernels();
  }
  throw std::invalid_argument("unknown kernel set '" + std::string(name) + "'");
}

}  // namespace skewirt::kernels
