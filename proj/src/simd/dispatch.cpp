#include "ksl/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ksl::simd {

#if defined(KSL_BUILD_AVX2)
const KernelTable* avx2_kernels_impl();
#endif

namespace {

const KernelTable* pick(const char* name) {
    if (name && std::strcmp(name, "scalar") == 0) return &scalar_kernels();
    const KernelTable* fast = avx2_kernels();
    if (name && std::strcmp(name, "avx2") == 0) return fast;
    return fast ? fast : &scalar_kernels();
}

const KernelTable*& current() {
    static const KernelTable* table = pick(std::getenv("KSL_SIMD"));
    return table;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(KSL_BUILD_AVX2)
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok ? avx2_kernels_impl() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    const KernelTable* t = current();
    return t ? *t : scalar_kernels();
}

bool select(const char* name) {
    if (!name || (std::strcmp(name, "auto") != 0 && std::strcmp(name, "scalar") != 0 && std::strcmp(name, "avx2") != 0))
        return false;
    const KernelTable* t = pick(name);
    if (!t) return false;
    current() = t;
    return true;
}

}  // namespace ksl::simd
