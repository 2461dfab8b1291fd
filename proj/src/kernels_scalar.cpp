#include "pintrack/kernels.hpp"

#include <cmath>
#include <limits>

namespace pintrack::kernels {

namespace {

void magnitude3_scalar(const double* x, const double* y, const double* z,
                       double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
}

double sum_scalar(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

void mean_var_scalar(const double* x, std::size_t n, double* mean, double* var) {
    if (n == 0) {
        *mean = std::numeric_limits<double>::quiet_NaN();
        *var = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    const double m = sum_scalar(x, n) / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - m;
        acc += d * d;
    }
    *mean = m;
    *var = acc / static_cast<double>(n);
}

void minmax_scalar(const double* x, std::size_t n, double* mn, double* mx) {
    if (n == 0) {
        *mn = std::numeric_limits<double>::quiet_NaN();
        *mx = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    double lo = x[0], hi = x[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    *mn = lo;
    *mx = hi;
}

void goertzel_power_scalar(const double* x, std::size_t n, const double* omega,
                           std::size_t m, double* power) {
    for (std::size_t k = 0; k < m; ++k) {
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

void fir_apply_scalar(const double* x, std::size_t n, const double* taps,
                      std::size_t t, double* out) {
    const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(t / 2);
    const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t i = 0; i < sn; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(t); ++j) {
            const std::ptrdiff_t k = i + j - c;
            if (k >= 0 && k < sn) acc += taps[j] * x[k];
        }
        out[i] = acc;
    }
}

void wrap_deltas_scalar(const double* h, std::size_t n, double* out) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = h[i + 1] - h[i];
        out[i] = d - 360.0 * std::floor((d + 180.0) / 360.0);
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{magnitude3_scalar, sum_scalar,    mean_var_scalar,
                               minmax_scalar,     goertzel_power_scalar,
                               fir_apply_scalar,  wrap_deltas_scalar};
    return t;
}

} // namespace pintrack::kernels
