#include "pintrack/signals.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/geo.hpp"
#include "pintrack/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace pintrack::signals {

std::vector<double> unwrap_degrees(std::span<const double> heading) {
    std::vector<double> out(heading.size());
    if (heading.empty()) return out;
    std::vector<double> deltas(heading.size() > 1 ? heading.size() - 1 : 0);
    if (!deltas.empty())
        kernels::wrap_deltas(heading.data(), heading.size(), deltas.data());
    out[0] = heading[0];
    for (std::size_t i = 1; i < heading.size(); ++i) out[i] = out[i - 1] + deltas[i - 1];
    return out;
}

std::vector<Plateau> find_plateaus(const std::vector<double>& u,
                                   const std::vector<double>& t, double tol,
                                   double min_s, std::size_t min_n) {
    const std::size_t n = u.size();
    std::vector<Plateau> out;
    if (n == 0) return out;

    std::deque<std::size_t> maxq, minq; // indices, values monotone
    std::size_t right = 0;
    std::size_t left = 0;
    auto window_ok_with = [&](std::size_t j) {
        const double hi = maxq.empty() ? u[j] : std::max(u[maxq.front()], u[j]);
        const double lo = minq.empty() ? u[j] : std::min(u[minq.front()], u[j]);
        return hi - lo <= tol;
    };
    while (left < n) {
        if (right < left) right = left;
        while (right < n && window_ok_with(right)) {
            while (!maxq.empty() && u[maxq.back()] <= u[right]) maxq.pop_back();
            maxq.push_back(right);
            while (!minq.empty() && u[minq.back()] >= u[right]) minq.pop_back();
            minq.push_back(right);
            ++right;
        }
        const std::size_t len = right - left;
        if (len >= min_n && len >= 1 && t[right - 1] - t[left] >= min_s) {
            double mean = 0.0;
            for (std::size_t i = left; i < right; ++i) mean += u[i];
            out.push_back(Plateau{left, right, mean / static_cast<double>(len)});
            left = right;
            maxq.clear();
            minq.clear();
        } else {
            ++left;
            while (!maxq.empty() && maxq.front() < left) maxq.pop_front();
            while (!minq.empty() && minq.front() < left) minq.pop_front();
        }
    }
    return out;
}

namespace {

std::vector<double> prefix_sums(const std::vector<double>& x) {
    std::vector<double> p(x.size() + 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) p[i + 1] = p[i] + x[i];
    return p;
}

} // namespace

std::vector<double> moving_mean(const std::vector<double>& x, std::size_t window_n) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    if (n == 0) return out;
    if (window_n % 2 == 0) ++window_n;
    const std::size_t half = window_n / 2;
    const auto p = prefix_sums(x);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i >= half ? i - half : 0;
        const std::size_t b = std::min(n, i + half + 1);
        out[i] = (p[b] - p[a]) / static_cast<double>(b - a);
    }
    return out;
}

std::vector<double> moving_std(const std::vector<double>& x, std::size_t window_n) {
    const std::size_t n = x.size();
    std::vector<double> out(n);
    if (n == 0) return out;
    if (window_n % 2 == 0) ++window_n;
    const std::size_t half = window_n / 2;
    const auto p = prefix_sums(x);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = x[i] * x[i];
    const auto p2 = prefix_sums(sq);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i >= half ? i - half : 0;
        const std::size_t b = std::min(n, i + half + 1);
        const double cnt = static_cast<double>(b - a);
        const double m = (p[b] - p[a]) / cnt;
        const double v = (p2[b] - p2[a]) / cnt - m * m;
        out[i] = std::sqrt(std::max(0.0, v));
    }
    return out;
}

Spectrum power_spectrum(const std::vector<double>& x, double rate_hz) {
    Spectrum s;
    const std::size_t n = x.size();
    if (n < 2) return s;
    double mean, var;
    kernels::mean_var(x.data(), n, &mean, &var);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = x[i] - mean;
    const std::size_t bins = n / 2;
    std::vector<double> omega(bins);
    for (std::size_t k = 1; k <= bins; ++k)
        omega[k - 1] = 2.0 * geo::kPi * static_cast<double>(k) / static_cast<double>(n);
    s.power.resize(bins);
    kernels::goertzel_power(centered.data(), n, omega.data(), bins, s.power.data());
    s.bin_hz = rate_hz / static_cast<double>(n);
    s.energy = kernels::sum(s.power.data(), bins) / static_cast<double>(n);
    return s;
}

double principal_freq_hz(const Spectrum& s) {
    if (s.power.empty()) return 0.0;
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.power.size(); ++k)
        if (s.power[k] > s.power[best]) best = k;
    return s.bin_hz * static_cast<double>(best + 1);
}

double band_fraction(const Spectrum& s, double lo_hz, double hi_hz) {
    if (s.power.empty()) return 0.0;
    double total = 0.0, band = 0.0;
    for (std::size_t k = 0; k < s.power.size(); ++k) {
        const double f = s.bin_hz * static_cast<double>(k + 1);
        total += s.power[k];
        if (f >= lo_hz && f <= hi_hz) band += s.power[k];
    }
    return total > 0.0 ? band / total : 0.0;
}

std::vector<double> band_pass(const std::vector<double>& x, double rate_hz,
                              double lo_hz, double hi_hz) {
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    const double nyquist = rate_hz / 2.0;
    hi_hz = std::min(hi_hz, 0.98 * nyquist);
    lo_hz = std::max(0.01, std::min(lo_hz, hi_hz));
    std::size_t taps = static_cast<std::size_t>(std::lround(4.0 * rate_hz / lo_hz)) | 1u;
    taps = std::min(taps, (n | 1u));
    taps = std::max<std::size_t>(taps, 5);
    const std::ptrdiff_t c = static_cast<std::ptrdiff_t>(taps / 2);
    std::vector<double> h(taps);
    const double wl = 2.0 * geo::kPi * lo_hz / rate_hz;
    const double wh = 2.0 * geo::kPi * hi_hz / rate_hz;
    for (std::size_t i = 0; i < taps; ++i) {
        const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i) - c;
        double ideal;
        if (k == 0)
            ideal = (wh - wl) / geo::kPi;
        else
            ideal = (std::sin(wh * k) - std::sin(wl * k)) / (geo::kPi * k);
        const double hamming =
            0.54 - 0.46 * std::cos(2.0 * geo::kPi * static_cast<double>(i) /
                                   static_cast<double>(taps - 1));
        h[i] = ideal * hamming;
    }
    kernels::fir_apply(x.data(), n, h.data(), taps, out.data());
    return out;
}

double circular_mean_deg(std::span<const double> degrees) {
    double s = 0.0, c = 0.0;
    for (double d : degrees) {
        s += std::sin(geo::deg2rad(d));
        c += std::cos(geo::deg2rad(d));
    }
    return geo::norm360(geo::rad2deg(std::atan2(s, c)));
}

std::vector<double> linear_deviation(const DataChunk& chunk) {
    const std::size_t n = chunk.size();
    std::vector<double> x = chunk_axis(chunk, 0), y = chunk_axis(chunk, 1),
                        z = chunk_axis(chunk, 2);
    double mx, my, mz, unused;
    kernels::mean_var(x.data(), n, &mx, &unused);
    kernels::mean_var(y.data(), n, &my, &unused);
    kernels::mean_var(z.data(), n, &mz, &unused);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] -= mx;
        y[i] -= my;
        z[i] -= mz;
    }
    std::vector<double> out(n);
    kernels::magnitude3(x.data(), y.data(), z.data(), out.data(), n);
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) return 0.0;
    p = std::clamp(p, 0.0, 100.0);
    const auto idx = static_cast<std::size_t>(
        std::lround(p / 100.0 * static_cast<double>(values.size() - 1)));
    std::nth_element(values.begin(), values.begin() + idx, values.end());
    return values[idx];
}

} // namespace pintrack::signals
