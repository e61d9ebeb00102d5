#include <cstdlib>
#include <string_view>

#include "hapticaffect/kernels.hpp"

namespace hapticaffect::kernels {

#if defined(HAPTICAFFECT_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table_unchecked() noexcept;
}
#endif

const KernelTable* avx2_table() noexcept {
#if defined(HAPTICAFFECT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return &detail::avx2_table_unchecked();
#endif
  return nullptr;
}

const KernelTable& active() noexcept {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("HAPTICAFFECT_KERNELS");
    if (forced && std::string_view(forced) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return table;
}

}  // namespace hapticaffect::kernels
