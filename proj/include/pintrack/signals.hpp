#pragma once

#include "pintrack/trace.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pintrack::signals {

// Cumulative heading: successive samples differ by the minimal signed angle,
// so a steady 90-degree right turn shows up as +90 without wraparound jumps.
std::vector<double> unwrap_degrees(std::span<const double> heading);

// Maximal runs where the unwrapped signal stays within a tolerance band,
// lasting at least min_s seconds and min_n samples. Runs are found greedily
// left to right and never overlap.
struct Plateau {
    std::size_t begin = 0, end = 0; // [begin, end)
    double mean = 0.0;
};
std::vector<Plateau> find_plateaus(const std::vector<double>& u,
                                   const std::vector<double>& t, double tol,
                                   double min_s, std::size_t min_n);

// Centered moving statistics with edge windows clamped to the valid range
// (no zero-padding bias). window_n is forced odd.
std::vector<double> moving_mean(const std::vector<double>& x, std::size_t window_n);
std::vector<double> moving_std(const std::vector<double>& x, std::size_t window_n);

// One-sided power spectrum of the mean-removed signal at bins k/N for
// k = 1..N/2 (DC excluded). power holds |X_k|^2.
struct Spectrum {
    double bin_hz = 0.0;
    std::vector<double> power;
    double energy = 0.0; // sum of bin powers / N
};
Spectrum power_spectrum(const std::vector<double>& x, double rate_hz);
double principal_freq_hz(const Spectrum& s);
double band_fraction(const Spectrum& s, double lo_hz, double hi_hz);

// Linear-phase windowed-sinc band-pass. The upper edge is clamped below the
// Nyquist rate.
std::vector<double> band_pass(const std::vector<double>& x, double rate_hz,
                              double lo_hz, double hi_hz);

double circular_mean_deg(std::span<const double> degrees);

// Per-sample distance of the accel vector from the chunk's mean vector; the
// mean is the gravity estimate, so this is the specific-force residual and is
// invariant to the unknown fixed device orientation.
std::vector<double> linear_deviation(const DataChunk& c);

double percentile(std::vector<double> values, double p); // p in [0, 100]

} // namespace pintrack::signals
