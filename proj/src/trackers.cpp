#include "pintrack/estimators/trackers.hpp"

#include "pintrack/estimators/elevation.hpp"
#include "pintrack/errors.hpp"
#include "pintrack/kernels.hpp"
#include "pintrack/signals.hpp"

#include <algorithm>
#include <cmath>

namespace pintrack {

using namespace signals;

namespace {

void require_label(const DataChunk& chunk, ActivityLabel want, const char* code) {
    if (chunk.label && *chunk.label != want)
        raise(code, std::string("chunk is labeled ") + to_string(*chunk.label));
}

struct StreamObservations {
    std::vector<LegObservation> legs;
    EndObservation entry, exit;
    TurnScan scan;
};

StreamObservations observe(const DataChunk& chunk, const WeatherReport& weather,
                           const TurnConfig& tc) {
    TurnScan scan = scan_turns(chunk, tc);
    if (!scan.has_plateaus)
        raise(errc::no_candidates, "heading stream never settles");
    StreamObservations obs;
    for (std::size_t i = 0; i < scan.turns.size(); ++i) {
        const TurnEvent& ev = scan.turns[i];
        obs.legs.push_back({ev.delta_deg, pressure_to_elevation(ev.pressure_hpa, weather),
                            0.0, i > 0 ? ev.t_s - scan.turns[i - 1].t_s : 0.0});
    }
    obs.entry.heading_deg = scan.initial_heading_deg;
    obs.entry.elevation_m = pressure_to_elevation(scan.initial_pressure_hpa, weather);
    obs.exit.heading_deg = scan.final_heading_deg;
    obs.exit.elevation_m = pressure_to_elevation(scan.final_pressure_hpa, weather);
    if (!scan.turns.empty() && !chunk.samples().empty()) {
        obs.entry.window_s = scan.turns.front().t_s - chunk.samples().front().t;
        obs.exit.window_s = chunk.samples().back().t - scan.turns.back().t_s;
    }
    obs.scan = std::move(scan);
    return obs;
}

} // namespace

RankedRoutes car_tracker(const DataChunk& chunk, const RoadGraph& graph,
                         const WeatherReport& weather,
                         const std::optional<SeedArea>& seed, const CarConfig& cfg) {
    require_label(chunk, ActivityLabel::driving, errc::not_driving);
    StreamObservations obs = observe(chunk, weather, cfg.turns);
    SearchConfig sc = cfg.search;
    sc.use_step_gate = false;
    sc.use_speed_gate = true;
    sc.time_quantum_s = 1.0 / chunk.rate_hz();
    return match_route(graph, obs.legs, obs.entry, obs.exit, seed, sc);
}

std::vector<std::size_t> detect_steps(const DataChunk& chunk, const StepConfig& cfg) {
    const double rate = chunk.rate_hz();
    if (rate < 2.0 * cfg.band_lo_hz)
        raise(errc::insufficient_data, "sampling too slow to resolve strides");

    std::vector<std::size_t> best;
    double best_power = -1.0;
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> x = chunk_axis(chunk, axis);
        double mean = 0.0, var = 0.0;
        kernels::mean_var(x.data(), x.size(), &mean, &var);
        for (double& v : x) v -= mean;
        std::vector<double> bp = band_pass(x, rate, cfg.band_lo_hz, cfg.band_hi_hz);

        double bpmean = 0.0, bpvar = 0.0;
        kernels::mean_var(bp.data(), bp.size(), &bpmean, &bpvar);
        if (bpvar <= best_power) continue;

        double lo = 0.0, hi = 0.0;
        kernels::minmax(bp.data(), bp.size(), &lo, &hi);
        const double amp = 0.5 * (hi - lo);
        if (amp < cfg.min_amp_ms2) continue;
        const double band = std::max(cfg.min_amp_ms2 * 0.5, cfg.hysteresis_frac * amp);

        std::vector<std::size_t> rising;
        bool armed = bp[0] < -band;
        for (std::size_t i = 1; i < bp.size(); ++i) {
            if (armed && bp[i] > band) {
                rising.push_back(i);
                armed = false;
            } else if (!armed && bp[i] < -band) {
                armed = true;
            }
        }
        if (rising.size() >= 2) {
            best = std::move(rising);
            best_power = bpvar;
        }
    }
    return best;
}

RankedRoutes walking_tracker(const DataChunk& chunk, const RoadGraph& graph,
                             const WeatherReport& weather,
                             const std::optional<SeedArea>& seed, const WalkConfig& cfg) {
    require_label(chunk, ActivityLabel::walking, errc::not_walking);
    StreamObservations obs = observe(chunk, weather, cfg.turns);
    if (obs.legs.empty())
        raise(errc::no_candidates, "no turn events to match against the map");

    const TurnScan& scan = obs.scan;
    std::vector<std::size_t> steps = detect_steps(chunk, cfg.steps);

    // Distribute strides over the legs the turn events delimit.
    std::vector<double> step_t(steps.size());
    const std::vector<double> t = chunk_times(chunk);
    for (std::size_t i = 0; i < steps.size(); ++i) step_t[i] = t[steps[i]];

    auto count_between = [&](double lo, double hi) {
        auto a = std::lower_bound(step_t.begin(), step_t.end(), lo);
        auto b = std::lower_bound(step_t.begin(), step_t.end(), hi);
        return static_cast<double>(b - a);
    };

    const double t_begin = t.front(), t_end = t.back() + 1.0;
    obs.entry.steps = count_between(t_begin, scan.turns.front().t_s);
    for (std::size_t k = 0; k + 1 < scan.turns.size(); ++k)
        obs.legs[k + 1].steps = count_between(scan.turns[k].t_s, scan.turns[k + 1].t_s);
    obs.exit.steps = count_between(scan.turns.back().t_s, t_end);

    SearchConfig sc = cfg.search;
    sc.use_step_gate = true;
    return match_route(graph, obs.legs, obs.entry, obs.exit, seed, sc);
}

std::vector<std::pair<double, double>> path_lat_lon(const RoadGraph& graph,
                                                    const CandidatePath& path) {
    std::vector<std::pair<double, double>> out;
    out.reserve(path.vertices.size());
    for (std::uint32_t v : path.vertices)
        out.emplace_back(graph.vertices[v].lat, graph.vertices[v].lon);
    return out;
}

std::vector<std::int64_t> path_node_ids(const RoadGraph& graph, const CandidatePath& path) {
    std::vector<std::int64_t> out;
    out.reserve(path.vertices.size());
    for (std::uint32_t v : path.vertices) out.push_back(graph.vertices[v].node_id);
    return out;
}

} // namespace pintrack
