#include "pintrack/estimators/turns.hpp"

#include "pintrack/geo.hpp"
#include "pintrack/kernels.hpp"
#include "pintrack/signals.hpp"

#include <algorithm>
#include <cmath>

namespace pintrack {

using namespace geo;

using namespace signals;

namespace {

double mean_over(const std::vector<double>& p, std::size_t begin, std::size_t end) {
    return kernels::sum(p.data() + begin, end - begin) / static_cast<double>(end - begin);
}

double mean_pressure_over(const std::vector<double>& t, const std::vector<double>& p,
                          std::size_t begin, std::size_t end, double span_s) {
    std::size_t stop = begin;
    while (stop < end && t[stop] - t[begin] <= span_s) ++stop;
    if (stop == begin) stop = begin + 1;
    return mean_over(p, begin, stop);
}

// Window centered on an instant; symmetric averaging cancels the first-order
// pressure drift of steady travel across sloped ground. When sampling is too
// sparse to fill the window, interpolating between the bracketing samples
// removes the drift a lone off-center sample would carry.
double mean_pressure_around(const std::vector<double>& t, const std::vector<double>& p,
                            double center_s, double span_s) {
    auto lo = std::lower_bound(t.begin(), t.end(), center_s - 0.5 * span_s);
    auto hi = std::upper_bound(t.begin(), t.end(), center_s + 0.5 * span_s);
    if (hi - lo >= 2) {
        const auto b = static_cast<std::size_t>(lo - t.begin());
        const auto e = static_cast<std::size_t>(hi - t.begin());
        return mean_over(p, b, e);
    }
    auto up = std::upper_bound(t.begin(), t.end(), center_s);
    if (up == t.begin()) return p.front();
    if (up == t.end()) return p.back();
    const std::size_t j = static_cast<std::size_t>(up - t.begin());
    const double dt = t[j] - t[j - 1];
    const double f = dt > 0.0 ? (center_s - t[j - 1]) / dt : 0.5;
    return p[j - 1] + f * (p[j] - p[j - 1]);
}

} // namespace

TurnScan scan_turns(const DataChunk& chunk, const TurnConfig& cfg) {
    TurnScan scan;
    const std::vector<double> t = chunk_times(chunk);
    const std::vector<double> p = chunk_pressures(chunk);
    const std::vector<double> u = unwrap_degrees(chunk_headings(chunk));

    std::vector<Plateau> plat =
        find_plateaus(u, t, cfg.plateau_tol_deg, cfg.plateau_min_s, cfg.plateau_min_n);
    if (plat.empty()) return scan;

    scan.has_plateaus = true;
    scan.initial_heading_deg = norm360(plat.front().mean);
    scan.final_heading_deg = norm360(plat.back().mean);
    scan.initial_pressure_hpa =
        mean_pressure_over(t, p, plat.front().begin, plat.front().end, cfg.settle_pressure_s);
    {
        // average the tail of the last plateau instead of its head
        const Plateau& last = plat.back();
        std::size_t from = last.end;
        while (from > last.begin && t[last.end - 1] - t[from - 1] <= cfg.settle_pressure_s)
            --from;
        if (from == last.end) from = last.end - 1;
        scan.final_pressure_hpa = mean_over(p, from, last.end);
    }

    for (std::size_t i = 1; i < plat.size(); ++i) {
        double delta = plat[i].mean - plat[i - 1].mean;
        scan.all_deltas.push_back(delta);
        double mag = std::abs(delta);
        if (mag < cfg.window_lo_deg || mag > cfg.window_hi_deg) continue;
        TurnEvent ev;
        ev.index = plat[i].begin;
        // The corner apex is where the heading crosses halfway between the
        // plateaus. The smoothed swing is symmetric around the corner, so the
        // crossing lands on it no matter how wide the smoothing stretched the
        // swing or how the plateau edges got trimmed.
        const std::size_t a = plat[i - 1].end - 1;
        const std::size_t b = plat[i].begin;
        const double half = 0.5 * (plat[i - 1].mean + plat[i].mean);
        const bool rising = plat[i].mean > plat[i - 1].mean;
        double t_apex = 0.5 * (t[a] + t[b]);
        for (std::size_t j = a; j < b; ++j) {
            const bool crosses = rising ? (u[j] <= half && u[j + 1] >= half)
                                        : (u[j] >= half && u[j + 1] <= half);
            if (crosses) {
                const double run = u[j + 1] - u[j];
                const double frac = run != 0.0 ? (half - u[j]) / run : 0.5;
                t_apex = t[j] + frac * (t[j + 1] - t[j]);
                break;
            }
        }
        ev.t_s = t_apex;
        ev.delta_deg = delta;
        ev.pressure_hpa = mean_pressure_around(t, p, t_apex, cfg.settle_pressure_s);
        scan.turns.push_back(ev);
    }
    return scan;
}

std::vector<TurnEvent> detect_turns(const DataChunk& chunk, const TurnConfig& cfg) {
    return scan_turns(chunk, cfg).turns;
}

} // namespace pintrack
