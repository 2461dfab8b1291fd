#include "pintrack/kernels.hpp"

#include <cmath>
#include <limits>

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace pintrack::kernels {

namespace {

void magnitude3_avx2(const double* x, const double* y, const double* z,
                     double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vz = _mm256_loadu_pd(z + i);
        __m256d acc = _mm256_mul_pd(vz, vz);
        acc = _mm256_fmadd_pd(vy, vy, acc);
        acc = _mm256_fmadd_pd(vx, vx, acc);
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(acc));
    }
    for (; i < n; ++i) out[i] = std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
}

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

void mean_var_avx2(const double* x, std::size_t n, double* mean, double* var) {
    if (n == 0) {
        *mean = std::numeric_limits<double>::quiet_NaN();
        *var = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    const double m = sum_avx2(x, n) / static_cast<double>(n);
    const __m256d vm = _mm256_set1_pd(m);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vm);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double a = hsum(acc);
    for (; i < n; ++i) {
        const double d = x[i] - m;
        a += d * d;
    }
    *mean = m;
    *var = a / static_cast<double>(n);
}

void minmax_avx2(const double* x, std::size_t n, double* mn, double* mx) {
    if (n == 0) {
        *mn = std::numeric_limits<double>::quiet_NaN();
        *mx = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    double lo = x[0], hi = x[0];
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vlo = _mm256_loadu_pd(x);
        __m256d vhi = vlo;
        for (i = 4; i + 4 <= n; i += 4) {
            const __m256d v = _mm256_loadu_pd(x + i);
            vlo = _mm256_min_pd(vlo, v);
            vhi = _mm256_max_pd(vhi, v);
        }
        alignas(32) double tmp[4];
        _mm256_store_pd(tmp, vlo);
        lo = std::min(std::min(tmp[0], tmp[1]), std::min(tmp[2], tmp[3]));
        _mm256_store_pd(tmp, vhi);
        hi = std::max(std::max(tmp[0], tmp[1]), std::max(tmp[2], tmp[3]));
    }
    for (; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    *mn = lo;
    *mx = hi;
}

// Four Goertzel recurrences advance in lockstep, one lane per bin.
void goertzel_power_avx2(const double* x, std::size_t n, const double* omega,
                         std::size_t m, double* power) {
    std::size_t k = 0;
    for (; k + 4 <= m; k += 4) {
        alignas(32) double c[4];
        for (int l = 0; l < 4; ++l) c[l] = 2.0 * std::cos(omega[k + l]);
        const __m256d coeff = _mm256_load_pd(c);
        __m256d s1 = _mm256_setzero_pd(), s2 = _mm256_setzero_pd();
        for (std::size_t j = 0; j < n; ++j) {
            const __m256d xj = _mm256_set1_pd(x[j]);
            const __m256d s0 = _mm256_add_pd(xj, _mm256_fmsub_pd(coeff, s1, s2));
            s2 = s1;
            s1 = s0;
        }
        // s1^2 + s2^2 - coeff*s1*s2
        __m256d p = _mm256_fmadd_pd(s1, s1, _mm256_mul_pd(s2, s2));
        p = _mm256_sub_pd(p, _mm256_mul_pd(coeff, _mm256_mul_pd(s1, s2)));
        _mm256_storeu_pd(power + k, p);
    }
    for (; k < m; ++k) {
        const double coeff = 2.0 * std::cos(omega[k]);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double s0 = x[j] + coeff * s1 - s2;
            s2 = s1;
            s1 = s0;
        }
        power[k] = s1 * s1 + s2 * s2 - coeff * s1 * s2;
    }
}

void fir_apply_avx2(const double* x, std::size_t n, const double* taps,
                    std::size_t t, double* out) {
    const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(t / 2);
    const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
    const std::ptrdiff_t st = static_cast<std::ptrdiff_t>(t);
    // interior rows where the whole tap window is in range
    const std::ptrdiff_t lo = std::min(sn, c);
    const std::ptrdiff_t hi = std::max(lo, sn - (st - c - 1));
    auto edge = [&](std::ptrdiff_t i) {
        double acc = 0.0;
        for (std::ptrdiff_t j = 0; j < st; ++j) {
            const std::ptrdiff_t k = i + j - c;
            if (k >= 0 && k < sn) acc += taps[j] * x[k];
        }
        out[i] = acc;
    };
    for (std::ptrdiff_t i = 0; i < lo; ++i) edge(i);
    std::ptrdiff_t i = lo;
    for (; i + 4 <= hi; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        const double* base = x + (i - c);
        for (std::ptrdiff_t j = 0; j < st; ++j)
            acc = _mm256_fmadd_pd(_mm256_set1_pd(taps[j]), _mm256_loadu_pd(base + j), acc);
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < hi; ++i) edge(i);
    for (i = hi; i < sn; ++i) edge(i);
}

void wrap_deltas_avx2(const double* h, std::size_t n, double* out) {
    if (n < 2) return;
    const std::size_t m = n - 1;
    const __m256d k360 = _mm256_set1_pd(360.0);
    const __m256d k180 = _mm256_set1_pd(180.0);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(h + i + 1), _mm256_loadu_pd(h + i));
        const __m256d f = _mm256_floor_pd(
            _mm256_div_pd(_mm256_add_pd(d, k180), k360));
        _mm256_storeu_pd(out + i, _mm256_fnmadd_pd(k360, f, d));
    }
    for (; i < m; ++i) {
        const double d = h[i + 1] - h[i];
        out[i] = d - 360.0 * std::floor((d + 180.0) / 360.0);
    }
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable t{magnitude3_avx2, sum_avx2,    mean_var_avx2,
                               minmax_avx2,     goertzel_power_avx2,
                               fir_apply_avx2,  wrap_deltas_avx2};
    return t;
}

} // namespace pintrack::kernels

#endif // __AVX2__ && __FMA__
