#include "ffd/kernels.hpp"

#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"

namespace ffd::kernels {

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return &scalar_table();
        case Backend::Avx2:
#if defined(FFD_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
            if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
                return &detail::avx2_table();
            }
#endif
            return nullptr;
        case Backend::Neon:
#if defined(FFD_HAVE_NEON_TU)
            return &detail::neon_table();  // Advanced SIMD is baseline on AArch64
#else
            return nullptr;
#endif
    }
    return nullptr;
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (auto b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
        if (table_for(b)) out.push_back(b);
    }
    return out;
}

const KernelTable& active() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        if (const char* env = std::getenv("FFD_KERNELS")) {
            const std::string want(env);
            for (auto b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
                if (want == backend_name(b)) {
                    const auto* t = table_for(b);
                    return t ? *t : scalar_table();
                }
            }
        }
        for (auto b : {Backend::Avx2, Backend::Neon}) {
            if (const auto* t = table_for(b)) return *t;
        }
        return scalar_table();
    }();
    return chosen;
}

}  // namespace ffd::kernels
