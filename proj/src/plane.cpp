#include "pintrack/estimators/plane.hpp"

#include "pintrack/estimators/elevation.hpp"
#include "pintrack/errors.hpp"
#include "pintrack/geo.hpp"
#include "pintrack/kernels.hpp"
#include "pintrack/signals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <span>

namespace pintrack {

using namespace geo;

using namespace signals;

namespace {

struct Region {
    std::size_t begin, end; // half-open sample range
};

std::vector<Region> mask_regions(const std::vector<char>& mask) {
    std::vector<Region> out;
    std::size_t i = 0;
    while (i < mask.size()) {
        if (!mask[i]) { ++i; continue; }
        std::size_t j = i;
        while (j < mask.size() && mask[j]) ++j;
        out.push_back({i, j});
        i = j;
    }
    return out;
}

void merge_regions(std::vector<Region>& regions, const std::vector<double>& t, double gap_s) {
    std::vector<Region> merged;
    for (const Region& r : regions) {
        if (!merged.empty() && t[r.begin] - t[merged.back().end - 1] < gap_s)
            merged.back().end = r.end;
        else
            merged.push_back(r);
    }
    regions = std::move(merged);
}

// First sustained span where rate crosses thresh with the given sign.
std::optional<Region> sustained_rate(const std::vector<double>& t,
                                     const std::vector<double>& rate, double thresh,
                                     int sign, double min_s, std::size_t from) {
    std::size_t i = from;
    const std::size_t n = rate.size();
    while (i < n) {
        if (sign * rate[i] <= thresh) { ++i; continue; }
        std::size_t j = i;
        while (j + 1 < n && sign * rate[j + 1] > thresh) ++j;
        if (t[j] - t[i] >= min_s) return Region{i, j + 1};
        i = j + 1;
    }
    return std::nullopt;
}

int mode_tz(std::span<const SensorSample> s, std::size_t begin, std::size_t end) {
    std::map<int, std::size_t> counts;
    for (std::size_t i = begin; i < end; ++i) ++counts[s[i].tz_minutes];
    int best = s[begin].tz_minutes;
    std::size_t best_n = 0;
    for (const auto& [tz, n] : counts)
        if (n > best_n) { best = tz; best_n = n; }
    return best;
}

double median_range(std::vector<double> xs) {
    auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
    std::nth_element(xs.begin(), mid, xs.end());
    return *mid;
}

} // namespace

FlightPhases detect_flight_phases(const DataChunk& chunk, const PhaseConfig& cfg) {
    const std::vector<double> t = chunk_times(chunk);
    const double rate_hz = chunk.rate_hz();
    const std::size_t n = t.size();
    if (n < 8) raise(errc::phases_not_found, "chunk too small to carry a flight");

    const std::size_t smooth_n = static_cast<std::size_t>(
        std::max(1.0, std::round(cfg.smooth_s * rate_hz)));
    std::vector<double> ps = moving_mean(chunk_pressures(chunk), smooth_n);

    // Cabin-equivalent height against a standard column; only rates matter.
    WeatherReport std_atm;
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = pressure_to_elevation(ps[i], std_atm);

    const std::size_t span = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::round(cfg.rate_span_s * rate_hz)));
    std::vector<double> vrate(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = std::min(n - 1, i + span);
        if (j == i) j = n - 1;
        vrate[i] = (h[j] - h[i]) / (t[j] - t[i]);
    }

    auto ascent = sustained_rate(t, vrate, cfg.climb_rate_ms, +1, cfg.climb_sustain_s, 0);
    if (!ascent) raise(errc::phases_not_found, "no sustained pressure drop");
    auto descent =
        sustained_rate(t, vrate, cfg.climb_rate_ms, -1, cfg.climb_sustain_s, ascent->end);
    if (!descent) raise(errc::phases_not_found, "no sustained pressure rise");
    if (t[descent->begin] - t[ascent->end] < cfg.min_cruise_s)
        raise(errc::phases_not_found, "no cruise between climb and descent");

    std::vector<double> ldev = linear_deviation(chunk);
    const std::size_t roll_n = static_cast<std::size_t>(
        std::max(1.0, std::round(cfg.roll_window_s * rate_hz)));
    std::vector<double> activity = moving_mean(ldev, roll_n);

    std::vector<char> moving(n, 0);
    for (std::size_t i = 0; i < n; ++i) moving[i] = activity[i] > cfg.activity_thresh_ms2;
    std::vector<Region> regions = mask_regions(moving);
    merge_regions(regions, t, cfg.activity_gap_s);
    if (regions.empty()) raise(errc::phases_not_found, "no taxi motion");

    FlightPhases ph;
    ph.t_climb_end = t[ascent->end - 1];
    ph.t_descent = t[descent->begin];
    ph.t_landing = t[descent->end - 1];

    // Taxi-out: the motion region that runs into the climb.
    const Region* dep_region = nullptr;
    for (const Region& r : regions)
        if (r.begin <= ascent->begin && (!dep_region || r.begin < dep_region->begin))
            if (r.end + span >= ascent->begin) dep_region = &r;
    if (!dep_region)
        for (const Region& r : regions)
            if (r.begin <= ascent->begin) dep_region = &r;
    if (!dep_region) raise(errc::phases_not_found, "no taxi before the climb");
    ph.t_gate_departure = t[dep_region->begin];

    // Taxi-in: the motion region the touchdown falls into (or the first after).
    const Region* arr_region = nullptr;
    for (const Region& r : regions)
        if (r.end > descent->end) { arr_region = &r; break; }
    if (!arr_region) raise(errc::phases_not_found, "no taxi after the descent");
    ph.t_gate_arrival = t[arr_region->end - 1];

    // Takeoff roll: strong sustained force just before the climb.
    std::vector<char> strong(n, 0);
    for (std::size_t i = 0; i < n; ++i) strong[i] = activity[i] > cfg.roll_thresh_ms2;
    std::vector<Region> bursts = mask_regions(strong);
    ph.t_takeoff = t[ascent->begin];
    for (const Region& r : bursts) {
        if (r.begin > ascent->begin) break;
        if (t[ascent->begin] - t[r.end - 1] <= 120.0) ph.t_takeoff = t[r.begin];
    }

    auto samples = chunk.samples();
    auto index_of = [&](double ts) {
        return static_cast<std::size_t>(
            std::lower_bound(t.begin(), t.end(), ts) - t.begin());
    };
    const std::size_t gate_dep_i = index_of(ph.t_gate_departure);
    const std::size_t takeoff_i = std::max(gate_dep_i + 1, index_of(ph.t_takeoff));
    const std::size_t landing_i = index_of(ph.t_landing);
    const std::size_t gate_arr_i =
        std::max(landing_i + 1, index_of(ph.t_gate_arrival));

    ph.tz_dep_minutes = mode_tz(samples, gate_dep_i, takeoff_i);
    ph.tz_dst_minutes = mode_tz(samples, landing_i, std::min(gate_arr_i + 1, n));

    std::vector<double> p = chunk_pressures(chunk);
    ph.pressure_dep_hpa = median_range(
        std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(gate_dep_i),
                            p.begin() + static_cast<std::ptrdiff_t>(takeoff_i)));
    ph.pressure_dst_hpa = median_range(
        std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(landing_i),
                            p.begin() + static_cast<std::ptrdiff_t>(
                                            std::min(gate_arr_i + 1, n))));
    return ph;
}

FlightFeatures flight_features(const DataChunk& chunk, const FlightPhases& phases,
                               const WeatherReport& weather_dep,
                               const WeatherReport& weather_dst) {
    FlightFeatures f;
    f.tz_dep_minutes = phases.tz_dep_minutes;
    f.tz_dst_minutes = phases.tz_dst_minutes;
    f.elev_dep_m = pressure_to_elevation(phases.pressure_dep_hpa, weather_dep);
    f.elev_dst_m = pressure_to_elevation(phases.pressure_dst_hpa, weather_dst);
    const std::int64_t anchor = chunk.trace->anchor_epoch_s;
    f.takeoff_epoch_s = anchor + static_cast<std::int64_t>(std::llround(phases.t_gate_departure));
    f.landing_epoch_s = anchor + static_cast<std::int64_t>(std::llround(phases.t_gate_arrival));
    f.duration_min = phases.duration_min();
    return f;
}

double modeled_duration_min(const AirportRecord& dep, const AirportRecord& dst,
                            const PlaneConfig& cfg) {
    const double km = haversine_m(dep.lat, dep.lon, dst.lat, dst.lon) / 1000.0;
    return km / cfg.cruise_kmh * 60.0 + cfg.overhead_min;
}

std::vector<FlightCandidate> match_flights(const FlightFeatures& obs,
                                           const std::vector<AirportRecord>& airports,
                                           const std::vector<FlightEntry>& flights,
                                           const PlaneConfig& cfg,
                                           const std::optional<std::string>& known_dep) {
    const double w_e = cfg.w_elev > 0.0 ? cfg.w_elev : 1.0 / cfg.tol_elev_m;
    const double w_d = cfg.w_duration > 0.0 ? cfg.w_duration : 1.0 / cfg.tol_duration_min;

    std::vector<FlightCandidate> out;
    for (const AirportRecord& a : airports) {
        if (known_dep && a.code != *known_dep) continue;
        if (a.tz_minutes != obs.tz_dep_minutes) continue;
        const double e_dep = std::abs(a.elevation_m - obs.elev_dep_m);
        if (e_dep > cfg.tol_elev_m) continue;
        for (const AirportRecord& b : airports) {
            if (b.code == a.code) continue;
            if (b.tz_minutes != obs.tz_dst_minutes) continue;
            const double e_dst = std::abs(b.elevation_m - obs.elev_dst_m);
            if (e_dst > cfg.tol_elev_m) continue;

            if (cfg.use_timetable) {
                for (const FlightEntry& fe : flights) {
                    if (fe.dep != a.code || fe.dst != b.code) continue;
                    const double dt_off = std::abs(static_cast<double>(
                                              obs.takeoff_epoch_s - fe.takeoff_epoch_s)) / 60.0;
                    const double dt_on = std::abs(static_cast<double>(
                                             obs.landing_epoch_s - fe.landing_epoch_s)) / 60.0;
                    if (dt_off > cfg.tol_time_min || dt_on > cfg.tol_time_min) continue;
                    const double d_dur = std::abs(obs.duration_min - fe.duration_min());
                    if (d_dur > cfg.tol_duration_min) continue;
                    FlightCandidate c;
                    c.dep = a.code;
                    c.dst = b.code;
                    c.entry = fe;
                    c.error = w_e * (e_dep + e_dst) + w_d * d_dur;
                    out.push_back(std::move(c));
                }
            } else {
                const double d_dur =
                    std::abs(obs.duration_min - modeled_duration_min(a, b, cfg));
                if (d_dur > cfg.tol_duration_min) continue;
                FlightCandidate c;
                c.dep = a.code;
                c.dst = b.code;
                c.error = w_e * (e_dep + e_dst) + w_d * d_dur;
                out.push_back(std::move(c));
            }
        }
    }
    if (out.empty()) raise(errc::no_route, "no airport pair fits the flight");
    std::sort(out.begin(), out.end(), [](const FlightCandidate& x, const FlightCandidate& y) {
        if (x.error != y.error) return x.error < y.error;
        if (x.dep != y.dep) return x.dep < y.dep;
        return x.dst < y.dst;
    });
    return out;
}

std::vector<FlightCandidate> plane_tracker(const DataChunk& chunk,
                                           const std::vector<AirportRecord>& airports,
                                           const std::vector<FlightEntry>& flights,
                                           const WeatherReport& weather_dep,
                                           const WeatherReport& weather_dst,
                                           const PlaneConfig& cfg,
                                           const std::optional<std::string>& known_dep) {
    FlightPhases phases = detect_flight_phases(chunk);
    FlightFeatures obs = flight_features(chunk, phases, weather_dep, weather_dst);
    return match_flights(obs, airports, flights, cfg, known_dep);
}

} // namespace pintrack
