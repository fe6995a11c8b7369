#include <cstdlib>
#include <string>

#include "iontrap/kernels.hpp"

namespace iontrap {

#if defined(IONTRAP_HAVE_AVX2)
namespace detail {
const KernelSet& avx2_kernel_set();
}
#endif

const KernelSet* avx2_kernels() {
#if defined(IONTRAP_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::avx2_kernel_set() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet* kernels_by_name(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return avx2_kernels();
  if (name == "auto" || name.empty()) {
    const KernelSet* wide = avx2_kernels();
    return wide != nullptr ? wide : &scalar_kernels();
  }
  return nullptr;
}

const KernelSet& active_kernels() {
  static const KernelSet* chosen = [] {
    const char* env = std::getenv("IONTRAP_KERNEL");
    const KernelSet* set = kernels_by_name(env != nullptr ? std::string_view(env) : "auto");
    return set != nullptr ? set : kernels_by_name("auto");
  }();
  return *chosen;
}

}  // namespace iontrap
