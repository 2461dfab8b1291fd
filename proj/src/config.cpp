#include "pintrack/config.hpp"

#include "pintrack/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace pintrack {

namespace {

struct Key {
    const char* name;
    enum Kind { Double, Int, Size, Bool, String, U64 } kind;
    void* ptr;
};

// One table drives parsing, serialization, and the unknown-key check.
std::vector<Key> key_table(RunConfig& c) {
    return {
        {"run.method", Key::String, &c.method},
        {"run.model_path", Key::String, &c.model_path},
        {"run.aux_root", Key::String, &c.aux_root},
        {"run.out_dir", Key::String, &c.out_dir},
        {"run.seed", Key::U64, &c.seed},
        {"run.seed_half_side_m", Key::Double, &c.seed_half_side_m},

        {"partition.threshold_ms2", Key::Double, &c.partition.threshold_ms2},
        {"partition.window_s", Key::Double, &c.partition.window_s},
        {"partition.min_samples", Key::Int, &c.partition.min_samples},
        {"partition.min_chunk_s", Key::Double, &c.partition.min_chunk_s},

        {"features.min_chunk_s", Key::Double, &c.tailored.features.min_chunk_s},
        {"features.min_rate_hz", Key::Double, &c.tailored.features.min_rate_hz},
        {"features.turn_min_deg", Key::Double, &c.tailored.features.turn_min_deg},
        {"features.plateau_tol_deg", Key::Double, &c.tailored.features.plateau_tol_deg},
        {"features.plateau_min_s", Key::Double, &c.tailored.features.plateau_min_s},
        {"features.plateau_min_n", Key::Size, &c.tailored.features.plateau_min_n},

        {"tailored.plane_pressure_range_hpa", Key::Double, &c.tailored.plane_pressure_range_hpa},
        {"tailored.plane_monotone_min_s", Key::Double, &c.tailored.plane_monotone_min_s},
        {"tailored.plane_monotone_eps_hpa", Key::Double, &c.tailored.plane_monotone_eps_hpa},
        {"tailored.plane_monotone_min_change_hpa", Key::Double, &c.tailored.plane_monotone_min_change_hpa},
        {"tailored.plane_smooth_s", Key::Double, &c.tailored.plane_smooth_s},
        {"tailored.train_heading_span_deg", Key::Double, &c.tailored.train_heading_span_deg},
        {"tailored.train_episode_thresh_ms2", Key::Double, &c.tailored.train_episode_thresh_ms2},
        {"tailored.train_episode_min_s", Key::Double, &c.tailored.train_episode_min_s},
        {"tailored.train_episode_max_s", Key::Double, &c.tailored.train_episode_max_s},
        {"tailored.train_min_episodes", Key::Int, &c.tailored.train_min_episodes},
        {"tailored.train_episode_gap_s", Key::Double, &c.tailored.train_episode_gap_s},
        {"tailored.walk_band_lo_hz", Key::Double, &c.tailored.walk_band_lo_hz},
        {"tailored.walk_band_hi_hz", Key::Double, &c.tailored.walk_band_hi_hz},
        {"tailored.walk_band_fraction", Key::Double, &c.tailored.walk_band_fraction},
        {"tailored.walk_min_axis_std", Key::Double, &c.tailored.walk_min_axis_std},
        {"tailored.drive_min_turns", Key::Int, &c.tailored.drive_min_turns},
        {"tailored.drive_min_activity_ms2", Key::Double, &c.tailored.drive_min_activity_ms2},
        {"tailored.roll_window_s", Key::Double, &c.tailored.roll_window_s},

        {"turns.window_lo_deg", Key::Double, &c.car.turns.window_lo_deg},
        {"turns.window_hi_deg", Key::Double, &c.car.turns.window_hi_deg},
        {"turns.plateau_tol_deg", Key::Double, &c.car.turns.plateau_tol_deg},
        {"turns.plateau_min_s", Key::Double, &c.car.turns.plateau_min_s},
        {"turns.plateau_min_n", Key::Size, &c.car.turns.plateau_min_n},
        {"turns.settle_pressure_s", Key::Double, &c.car.turns.settle_pressure_s},

        {"search.tol_elev_m", Key::Double, &c.car.search.tol_elev_m},
        {"search.tol_turn_deg", Key::Double, &c.car.search.tol_turn_deg},
        {"search.w_elev", Key::Double, &c.car.search.w_elev},
        {"search.w_turn", Key::Double, &c.car.search.w_turn},
        {"search.straight_tol_deg", Key::Double, &c.car.search.straight_tol_deg},
        {"search.bearing_tol_deg", Key::Double, &c.car.search.bearing_tol_deg},
        {"search.max_chain_edges", Key::Int, &c.car.search.max_chain_edges},

        {"walk.step_min_m", Key::Double, &c.walk.search.step_min_m},
        {"walk.step_max_m", Key::Double, &c.walk.search.step_max_m},
        {"steps.band_lo_hz", Key::Double, &c.walk.steps.band_lo_hz},
        {"steps.band_hi_hz", Key::Double, &c.walk.steps.band_hi_hz},
        {"steps.hysteresis_frac", Key::Double, &c.walk.steps.hysteresis_frac},
        {"steps.min_amp_ms2", Key::Double, &c.walk.steps.min_amp_ms2},

        {"phase.climb_rate_ms", Key::Double, &c.phase.climb_rate_ms},
        {"phase.climb_sustain_s", Key::Double, &c.phase.climb_sustain_s},
        {"phase.rate_span_s", Key::Double, &c.phase.rate_span_s},
        {"phase.smooth_s", Key::Double, &c.phase.smooth_s},
        {"phase.min_cruise_s", Key::Double, &c.phase.min_cruise_s},
        {"phase.activity_thresh_ms2", Key::Double, &c.phase.activity_thresh_ms2},
        {"phase.activity_gap_s", Key::Double, &c.phase.activity_gap_s},
        {"phase.roll_thresh_ms2", Key::Double, &c.phase.roll_thresh_ms2},
        {"phase.roll_window_s", Key::Double, &c.phase.roll_window_s},

        {"plane.tol_elev_m", Key::Double, &c.plane.tol_elev_m},
        {"plane.tol_duration_min", Key::Double, &c.plane.tol_duration_min},
        {"plane.tol_time_min", Key::Double, &c.plane.tol_time_min},
        {"plane.w_elev", Key::Double, &c.plane.w_elev},
        {"plane.w_duration", Key::Double, &c.plane.w_duration},
        {"plane.use_timetable", Key::Bool, &c.plane.use_timetable},
        {"plane.cruise_kmh", Key::Double, &c.plane.cruise_kmh},
        {"plane.overhead_min", Key::Double, &c.plane.overhead_min},

        {"train_stops.move_thresh_ms2", Key::Double, &c.train_stops.move_thresh_ms2},
        {"train_stops.roll_window_s", Key::Double, &c.train_stops.roll_window_s},
        {"train_stops.merge_gap_s", Key::Double, &c.train_stops.merge_gap_s},
        {"train_stops.min_dwell_s", Key::Double, &c.train_stops.min_dwell_s},
        {"train_stops.heading_span_s", Key::Double, &c.train_stops.heading_span_s},

        {"train.departure_window_min", Key::Double, &c.train.departure_window_min},
        {"train.d_per_interval_min", Key::Double, &c.train.d_per_interval_min},
        {"train.heading_tol_deg", Key::Double, &c.train.heading_tol_deg},

        {"noise.heading_sigma_deg", Key::Double, &c.noise_heading_sigma_deg},
        {"noise.pressure_sigma_hpa", Key::Double, &c.noise_pressure_sigma_hpa},
        {"noise.accel_sigma_ms2", Key::Double, &c.noise_accel_sigma_ms2},
    };
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    raise(errc::config_error, "bad value '" + value + "' for key " + key);
}

void assign(const Key& k, const std::string& key, const std::string& value) {
    switch (k.kind) {
    case Key::Double: {
        char* end = nullptr;
        double d = std::strtod(value.c_str(), &end);
        if (end != value.c_str() + value.size() || value.empty()) bad_value(key, value);
        *static_cast<double*>(k.ptr) = d;
        return;
    }
    case Key::Int: {
        int v = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || p != value.data() + value.size()) bad_value(key, value);
        *static_cast<int*>(k.ptr) = v;
        return;
    }
    case Key::Size: {
        std::size_t v = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || p != value.data() + value.size()) bad_value(key, value);
        *static_cast<std::size_t*>(k.ptr) = v;
        return;
    }
    case Key::U64: {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || p != value.data() + value.size()) bad_value(key, value);
        *static_cast<std::uint64_t*>(k.ptr) = v;
        return;
    }
    case Key::Bool:
        if (value == "true") *static_cast<bool*>(k.ptr) = true;
        else if (value == "false") *static_cast<bool*>(k.ptr) = false;
        else bad_value(key, value);
        return;
    case Key::String:
        *static_cast<std::string*>(k.ptr) = value;
        return;
    }
    bad_value(key, value);
}

std::string render(const Key& k) {
    switch (k.kind) {
    case Key::Double: return fmt::format("{}", *static_cast<double*>(k.ptr));
    case Key::Int: return fmt::format("{}", *static_cast<int*>(k.ptr));
    case Key::Size: return fmt::format("{}", *static_cast<std::size_t*>(k.ptr));
    case Key::U64: return fmt::format("{}", *static_cast<std::uint64_t*>(k.ptr));
    case Key::Bool: return *static_cast<bool*>(k.ptr) ? "true" : "false";
    case Key::String: return *static_cast<std::string*>(k.ptr);
    }
    return {};
}

} // namespace

void config_set(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const Key& k : key_table(cfg)) {
        if (key == k.name) {
            assign(k, key, value);
            return;
        }
    }
    raise(errc::config_error, "unknown config key: " + key);
}

void finalize_config(RunConfig& cfg) {
    // the turn scan and search tolerances are shared knobs; only the stride
    // gates are walking-specific
    const double smin = cfg.walk.search.step_min_m;
    const double smax = cfg.walk.search.step_max_m;
    cfg.walk.turns = cfg.car.turns;
    cfg.walk.search = cfg.car.search;
    cfg.walk.search.step_min_m = smin;
    cfg.walk.search.step_max_m = smax;
    cfg.walk.search.use_step_gate = true;
}

RunConfig load_config(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r'))
            sv.remove_suffix(1);
        if (sv.empty() || sv.front() == '#') continue;
        auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            raise(errc::config_error,
                  "line " + std::to_string(lineno) + ": expected key=value");
        std::string key(sv.substr(0, eq));
        std::string value(sv.substr(eq + 1));
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        config_set(cfg, key, value);
    }
    finalize_config(cfg);
    return cfg;
}

void save_config(const RunConfig& cfg, std::ostream& out) {
    auto& mut = const_cast<RunConfig&>(cfg);
    std::string section;
    for (const Key& k : key_table(mut)) {
        std::string name(k.name);
        std::string sec = name.substr(0, name.find('.'));
        if (sec != section) {
            if (!section.empty()) out << '\n';
            section = sec;
        }
        out << name << " = " << render(k) << '\n';
    }
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::config_error, "cannot open config " + path);
    return load_config(in);
}

void save_config_file(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(errc::config_error, "cannot open " + path + " for writing");
    save_config(cfg, out);
}

} // namespace pintrack
