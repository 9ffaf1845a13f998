#include <cstdlib>
#include <string_view>

#include "cqkit/kernels.hpp"

namespace cqkit::kernels {

#if defined(CQKIT_HAVE_AVX2_TU)
namespace detail {
const KernelSet& avx2_set();
}
#endif

const KernelSet* avx2() {
#if defined(CQKIT_HAVE_AVX2_TU)
    static const bool supported = __builtin_cpu_supports("avx2") != 0;
    return supported ? &detail::avx2_set() : nullptr;
#else
    return nullptr;
#endif
}

const KernelSet& active() {
    static const KernelSet* chosen = [] {
        const char* env = std::getenv("CQKIT_SIMD");
        if (env != nullptr && std::string_view(env) == "scalar") {
            return &scalar();
        }
        const KernelSet* fast = avx2();
        return fast != nullptr ? fast : &scalar();
    }();
    return *chosen;
}

}  // namespace cqkit::kernels
