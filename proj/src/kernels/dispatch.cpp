#include "nsaflow/kernels.hpp"

#include <cstdlib>
#include <string>

namespace nsaflow::kernels {

bool available(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return true;
    case SimdLevel::avx2:
#if defined(NSAFLOW_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(SimdLevel level) {
#if defined(NSAFLOW_HAVE_AVX2)
  if (level == SimdLevel::avx2 && available(SimdLevel::avx2)) return detail::avx2_table();
#endif
  (void)level;
  return detail::scalar_table();
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    if (const char* env = std::getenv("NSAFLOW_SIMD")) {
      if (std::string(env) == "scalar") return table(SimdLevel::scalar);
    }
    return table(SimdLevel::avx2);
  }();
  return chosen;
}

std::string_view name(SimdLevel level) {
  return level == SimdLevel::avx2 ? "avx2" : "scalar";
}

}  // namespace nsaflow::kernels
