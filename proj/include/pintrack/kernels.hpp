#pragma once

#include <cstddef>

namespace pintrack::kernels {

// Sample-wise numeric inner loops used by the signal layer. Each kernel has a
// scalar reference implementation and an AVX2 variant; the active table is
// picked once at startup from cpu capabilities (PINTRACK_KERNELS=scalar|avx2
// overrides for debugging). Variants are equivalence-tested against the
// scalar reference; callers must not depend on bit-exact agreement between
// backends, only on the documented tolerance (1e-12 relative).
struct KernelTable {
    // out[i] = sqrt(x[i]^2 + y[i]^2 + z[i]^2)
    void (*magnitude3)(const double* x, const double* y, const double* z,
                       double* out, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    // population statistics; n == 0 yields NaNs
    void (*mean_var)(const double* x, std::size_t n, double* mean, double* var);
    void (*minmax)(const double* x, std::size_t n, double* mn, double* mx);
    // power[i] = |sum_j x[j] * e^{-i*omega[i]*j}|^2 (Goertzel recurrence per bin)
    void (*goertzel_power)(const double* x, std::size_t n, const double* omega,
                           std::size_t m, double* power);
    // centered FIR, zero-padded edges: out[i] = sum_j taps[j] * x[i + j - t/2], t odd
    void (*fir_apply)(const double* x, std::size_t n, const double* taps,
                      std::size_t t, double* out);
    // out[i] = h[i+1] - h[i] wrapped to [-180, 180); writes n-1 values
    void (*wrap_deltas)(const double* h, std::size_t n, double* out);
};

enum class Backend { scalar, avx2 };

bool avx2_available();
Backend active_backend();
// scalar table is always valid; requesting avx2 on a cpu without it returns scalar
const KernelTable& table(Backend b);
const KernelTable& active();

inline void magnitude3(const double* x, const double* y, const double* z,
                       double* out, std::size_t n) {
    active().magnitude3(x, y, z, out, n);
}
inline double sum(const double* x, std::size_t n) { return active().sum(x, n); }
inline void mean_var(const double* x, std::size_t n, double* mean, double* var) {
    active().mean_var(x, n, mean, var);
}
inline void minmax(const double* x, std::size_t n, double* mn, double* mx) {
    active().minmax(x, n, mn, mx);
}
inline void goertzel_power(const double* x, std::size_t n, const double* omega,
                           std::size_t m, double* power) {
    active().goertzel_power(x, n, omega, m, power);
}
inline void fir_apply(const double* x, std::size_t n, const double* taps,
                      std::size_t t, double* out) {
    active().fir_apply(x, n, taps, t, out);
}
inline void wrap_deltas(const double* h, std::size_t n, double* out) {
    active().wrap_deltas(h, n, out);
}

} // namespace pintrack::kernels
