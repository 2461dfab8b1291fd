#include "pintrack/figdata.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/estimators/plane.hpp"
#include "pintrack/estimators/trackers.hpp"
#include "pintrack/geo.hpp"
#include "pintrack/synth/scenarios.hpp"
#include "pintrack/synth/world.hpp"
#include "pintrack/trace.hpp"

#include <fmt/format.h>

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace pintrack::figdata {
namespace {

using synth::CityParams;
using synth::NoiseParams;
using synth::RouteSpec;
using synth::TruthLeg;
using synth::World;

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Rough-relief city shared by the ground-tracker sweeps.
World ground_city(std::uint64_t seed) {
    CityParams p;
    p.seed = mix(seed, 1);
    p.name = "figtown";
    p.n_intersections = 529;
    return synth::gen_city(p);
}

// Long blocks and gentle relief, so turn plateaus survive aggressive
// downsampling: legs run 60-100 s between corners. Most streets are kept;
// long straight runs are too rare on a thinned grid to route over.
World slow_rate_city(std::uint64_t seed) {
    CityParams p;
    p.seed = mix(seed, 2);
    p.name = "figplains";
    p.n_intersections = 529;
    p.spacing_m = 200.0;
    p.street_fraction = 0.85;
    p.relief_wavelength_min_m = 1200.0;
    p.relief_wavelength_max_m = 2400.0;
    return synth::gen_city(p);
}

double endpoint_error_pct(const World& w, const CandidatePath& top, const TruthLeg& leg) {
    const auto& v = w.graph.vertices[top.vertices.back()];
    const double d =
        geo::haversine_m(v.lat, v.lon, leg.path.back().first, leg.path.back().second);
    return 100.0 * d / leg.distance_m;
}

bool unique_top(const RankedRoutes& r) {
    return r.paths.size() == 1 || r.paths[1].error > r.paths[0].error + 1e-12;
}

void run_fig4(std::uint64_t seed, std::ostream& out) {
    World w = ground_city(seed);
    out << "run,n_turns,distance_m,approx_error_pct\n";
    int run = 0;
    for (int turns = 5; turns <= 18; ++turns) {
        for (int rep = 0; rep < 4; ++rep, ++run) {
            RouteSpec spec;
            spec.n_turns = turns;
            auto r = synth::gen_drive(w, mix(seed, 100 + static_cast<std::uint64_t>(run)),
                                      spec, 5.0, NoiseParams{});
            const TruthLeg& leg = r.legs.front();
            std::string err;
            try {
                auto ranked = car_tracker(whole_trace_chunk(r.trace), w.graph, w.weather);
                err = fmt::format("{:.4f}",
                                  endpoint_error_pct(w, ranked.paths.front(), leg));
            } catch (const Error&) {
                // row kept so the failure is visible in the plot
            }
            out << fmt::format("{},{},{:.1f},{}\n", run, turns, leg.distance_m, err);
        }
    }
}

void run_fig5(std::uint64_t seed, std::ostream& out) {
    World w = ground_city(seed);
    out << "run,turn,roots,paths\n";
    for (int run = 0; run < 6; ++run) {
        RouteSpec spec;
        spec.n_turns = 10;
        auto r = synth::gen_drive(w, mix(seed, 300 + static_cast<std::uint64_t>(run)),
                                  spec, 5.0, NoiseParams{});
        auto ranked = car_tracker(whole_trace_chunk(r.trace), w.graph, w.weather);
        for (std::size_t k = 0; k < ranked.roots_per_turn.size(); ++k)
            out << fmt::format("{},{},{},{}\n", run, k + 1, ranked.roots_per_turn[k],
                               ranked.paths_per_turn[k]);
    }
}

// Flight matcher accuracy under synthetic measurement noise. The scale axis
// runs the injected noise from zero up to 5 m of elevation error and 10% of
// flight duration, drawn symmetrically.
void run_flight_mc(std::uint64_t seed, bool known_dep, std::ostream& out) {
    const auto db = synth::gen_airports(mix(seed, 4), 50);
    PlaneConfig pc;
    pc.use_timetable = false;

    out << "noise_scale,trials,top1_rate,top3_rate\n";
    for (int s = 0; s <= 10; ++s) {
        const double scale = 0.1 * s;
        std::mt19937_64 rng(mix(seed, 500 + static_cast<std::uint64_t>(s)));
        std::uniform_int_distribution<std::size_t> pick(0, db.size() - 1);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const int trials = 500;
        int top1 = 0, top3 = 0;
        for (int t = 0; t < trials; ++t) {
            const std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            while (j == i) j = pick(rng);

            FlightFeatures obs;
            obs.tz_dep_minutes = db[i].tz_minutes;
            obs.tz_dst_minutes = db[j].tz_minutes;
            obs.elev_dep_m = db[i].elevation_m + u(rng) * 5.0 * scale;
            obs.elev_dst_m = db[j].elevation_m + u(rng) * 5.0 * scale;
            const double dur = modeled_duration_min(db[i], db[j], pc);
            obs.duration_min = dur * (1.0 + u(rng) * 0.10 * scale);
            obs.takeoff_epoch_s = 1600000000;
            obs.landing_epoch_s =
                obs.takeoff_epoch_s + static_cast<std::int64_t>(obs.duration_min * 60.0);

            std::optional<std::string> dep_hint;
            if (known_dep) dep_hint = db[i].code;
            std::vector<FlightCandidate> cands;
            try {
                cands = match_flights(obs, db, {}, pc, dep_hint);
            } catch (const Error&) {
                continue; // a miss
            }
            for (std::size_t k = 0; k < cands.size() && k < 3; ++k) {
                if (cands[k].dep == db[i].code && cands[k].dst == db[j].code) {
                    if (k == 0) ++top1;
                    ++top3;
                    break;
                }
            }
        }
        out << fmt::format("{:.1f},{},{:.3f},{:.3f}\n", scale, trials,
                           static_cast<double>(top1) / trials,
                           static_cast<double>(top3) / trials);
    }
}

void run_fig8(std::uint64_t seed, std::ostream& out) {
    World w = ground_city(seed);
    out << "walk,steps,distance_m,approx_error_pct\n";
    for (int i = 0; i < 30; ++i) {
        RouteSpec spec;
        spec.n_turns = 4 + i % 5;
        auto r = synth::gen_walk(w, mix(seed, 700 + static_cast<std::uint64_t>(i)), spec,
                                 5.0, NoiseParams{});
        const TruthLeg& leg = r.legs.front();
        const SeedArea box{leg.path.front().first, leg.path.front().second, 150.0};
        std::string err;
        try {
            auto ranked =
                walking_tracker(whole_trace_chunk(r.trace), w.graph, w.weather, box);
            err = fmt::format("{:.4f}", endpoint_error_pct(w, ranked.paths.front(), leg));
        } catch (const Error&) {
        }
        out << fmt::format("{},{},{:.1f},{}\n", i, leg.steps, leg.distance_m, err);
    }
}

// One drive resampled across two decades of rate. A row is ok only when the
// tracker comes back unique and exactly on the true vertex sequence.
void run_fig9(std::uint64_t seed, std::ostream& out) {
    World w = slow_rate_city(seed);
    RouteSpec spec;
    spec.n_turns = 8;
    spec.min_run_blocks = 3;
    spec.max_run_blocks = 5;
    auto r = synth::gen_drive(w, mix(seed, 900), spec, 5.0, NoiseParams{});
    const TruthLeg& leg = r.legs.front();

    out << "rate_hz,status,approx_error_pct\n";
    for (const double rate : {5.0, 1.0, 0.5, 0.1, 0.05, 0.02}) {
        const SensorTrace t = rate == 5.0 ? r.trace : resample(r.trace, rate);
        std::string status = "failed";
        std::string err;
        try {
            auto ranked = car_tracker(whole_trace_chunk(t), w.graph, w.weather);
            if (unique_top(ranked) &&
                path_node_ids(w.graph, ranked.paths.front()) == leg.node_ids) {
                status = "ok";
                err = fmt::format("{:.4f}",
                                  endpoint_error_pct(w, ranked.paths.front(), leg));
            }
        } catch (const Error&) {
        }
        out << fmt::format("{},{},{}\n", rate, status, err);
    }
}

} // namespace

Experiment parse_experiment(const std::string& name) {
    if (name == "fig4") return Experiment::fig4;
    if (name == "fig5") return Experiment::fig5;
    if (name == "fig6") return Experiment::fig6;
    if (name == "fig7") return Experiment::fig7;
    if (name == "fig8") return Experiment::fig8;
    if (name == "fig9") return Experiment::fig9;
    raise(errc::unknown_experiment, "no experiment named '" + name + "' (fig4..fig9)");
}

const char* to_string(Experiment e) {
    switch (e) {
        case Experiment::fig4: return "fig4";
        case Experiment::fig5: return "fig5";
        case Experiment::fig6: return "fig6";
        case Experiment::fig7: return "fig7";
        case Experiment::fig8: return "fig8";
        case Experiment::fig9: return "fig9";
    }
    return "?";
}

void run_experiment(Experiment e, std::uint64_t seed, std::ostream& out) {
    out << fmt::format("# seed={}\n", seed);
    switch (e) {
        case Experiment::fig4: run_fig4(seed, out); break;
        case Experiment::fig5: run_fig5(seed, out); break;
        case Experiment::fig6: run_flight_mc(seed, false, out); break;
        case Experiment::fig7: run_flight_mc(seed, true, out); break;
        case Experiment::fig8: run_fig8(seed, out); break;
        case Experiment::fig9: run_fig9(seed, out); break;
    }
}

} // namespace pintrack::figdata
