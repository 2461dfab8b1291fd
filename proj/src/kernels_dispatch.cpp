#include "pintrack/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace pintrack::kernels {

const KernelTable& scalar_table();
#ifdef PINTRACK_WITH_AVX2
const KernelTable& avx2_table();
#endif

bool avx2_available() {
#if defined(PINTRACK_WITH_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& table(Backend b) {
#ifdef PINTRACK_WITH_AVX2
    if (b == Backend::avx2 && avx2_available()) return avx2_table();
#else
    (void)b;
#endif
    return scalar_table();
}

namespace {

Backend choose_backend() {
    if (const char* env = std::getenv("PINTRACK_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::avx2;
    }
    return avx2_available() ? Backend::avx2 : Backend::scalar;
}

} // namespace

Backend active_backend() {
    static const Backend b = choose_backend();
    return b;
}

const KernelTable& active() { return table(active_backend()); }

} // namespace pintrack::kernels
