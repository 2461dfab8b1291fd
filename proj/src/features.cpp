#include "pintrack/classify.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/kernels.hpp"
#include "pintrack/signals.hpp"

#include <algorithm>
#include <cmath>

namespace pintrack {

using namespace signals;

const std::array<const char*, FeatureVector::kSize> kFeatureNames{
    "ax_mean",      "ax_median", "ax_std",      "ax_pf_hz",   "ax_energy",
    "ay_mean",      "ay_median", "ay_std",      "ay_pf_hz",   "ay_energy",
    "az_mean",      "az_median", "az_std",      "az_pf_hz",   "az_energy",
    "press_mean",   "press_median", "press_std", "press_range",
    "head_turns",   "head_max_rate"};

namespace {

double median_of(std::vector<double> xs) {
    const std::size_t n = xs.size();
    auto mid = xs.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    if (n % 2 == 1) return *mid;
    double hi = *mid;
    double lo = *std::max_element(xs.begin(), mid);
    return 0.5 * (lo + hi);
}

// Largest heading change over any window of roughly one second.
double max_heading_rate(const std::vector<double>& t, const std::vector<double>& u) {
    const std::size_t n = t.size();
    if (n < 2) return 0.0;
    double best = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (j <= i) j = i + 1;
        while (j + 1 < n && t[j] - t[i] < 1.0) ++j;
        double dt = t[j] - t[i];
        if (dt <= 0.0) continue;
        best = std::max(best, std::abs(u[j] - u[i]) / dt);
    }
    return best;
}

} // namespace

FeatureVector extract_features(const DataChunk& chunk, const FeatureConfig& cfg) {
    if (chunk.duration_s() < cfg.min_chunk_s)
        raise(errc::chunk_too_short,
                      "chunk spans " + std::to_string(chunk.duration_s()) +
                          " s, need at least " + std::to_string(cfg.min_chunk_s));

    const std::vector<double> t = chunk_times(chunk);
    const double rate = chunk.rate_hz();
    const bool spectral = rate >= cfg.min_rate_hz;

    FeatureVector f;
    std::size_t k = 0;
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> x = chunk_axis(chunk, axis);
        double mean = 0.0, var = 0.0;
        kernels::mean_var(x.data(), x.size(), &mean, &var);
        f[k++] = mean;
        f[k++] = median_of(x);
        f[k++] = std::sqrt(var);
        if (spectral) {
            Spectrum s = power_spectrum(x, rate);
            f[k++] = principal_freq_hz(s);
            f[k++] = s.energy;
        } else {
            f[k++] = 0.0;
            double e = 0.0;
            for (double v : x) e += (v - mean) * (v - mean);
            f[k++] = e;
        }
    }

    std::vector<double> p = chunk_pressures(chunk);
    double pmean = 0.0, pvar = 0.0;
    kernels::mean_var(p.data(), p.size(), &pmean, &pvar);
    double pmin = 0.0, pmax = 0.0;
    kernels::minmax(p.data(), p.size(), &pmin, &pmax);
    f[k++] = pmean;
    f[k++] = median_of(p);
    f[k++] = std::sqrt(pvar);
    f[k++] = pmax - pmin;

    std::vector<double> u = unwrap_degrees(chunk_headings(chunk));
    std::vector<Plateau> plat =
        find_plateaus(u, t, cfg.plateau_tol_deg, cfg.plateau_min_s, cfg.plateau_min_n);
    int turns = 0;
    for (std::size_t i = 1; i < plat.size(); ++i)
        if (std::abs(plat[i].mean - plat[i - 1].mean) >= cfg.turn_min_deg) ++turns;
    f[k++] = static_cast<double>(turns);
    f[k++] = max_heading_rate(t, u);

    return f;
}

} // namespace pintrack
