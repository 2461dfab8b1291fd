#include "pintrack/synth/scenarios.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/estimators/elevation.hpp"
#include "pintrack/geo.hpp"
#include "pintrack/signals.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <random>

namespace pintrack::synth {

using namespace geo;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kGravity = 9.81;
constexpr std::int64_t kDayAnchor = 1700000000; // any fixed UTC instant

// ----------------------------------------------------------- device attitude

// Uniform random rotation (quaternion method). Each chunk gets one: the
// phone sits however it sits, and the estimators must not care.
struct Rotation {
    std::array<std::array<double, 3>, 3> m{};

    static Rotation random(std::mt19937_64& rng) {
        std::normal_distribution<double> g(0.0, 1.0);
        double q[4];
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& qi : q) {
                qi = g(rng);
                norm += qi * qi;
            }
        } while (norm < 1e-12);
        norm = std::sqrt(norm);
        for (double& qi : q) qi /= norm;
        const double w = q[0], x = q[1], y = q[2], z = q[3];
        Rotation r;
        r.m = {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
                {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
                {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
        return r;
    }

    std::array<double, 3> apply(const std::array<double, 3>& v) const {
        std::array<double, 3> out{};
        for (int i = 0; i < 3; ++i)
            out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
        return out;
    }

    static Rotation identity() {
        Rotation r;
        r.m = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
        return r;
    }
};

// -------------------------------------------------------------- trace output

// Accumulates samples tick by tick. World frame is x east, y north, z up;
// the accelerometer reports specific force, so a resting device reads +g up,
// rotated into whatever attitude the current chunk rolled.
class TraceBuilder {
public:
    TraceBuilder(std::uint64_t seed, double rate_hz, const NoiseParams& noise,
                 std::int64_t anchor_epoch_s)
        : rng_(seed), noise_(noise), dt_(1.0 / rate_hz), rot_(Rotation::identity()) {
        trace_.nominal_rate_hz = rate_hz;
        trace_.anchor_epoch_s = anchor_epoch_s;
    }

    std::mt19937_64& rng() { return rng_; }
    double t() const { return next_t_; }
    double dt() const { return dt_; }

    void begin_chunk() { rot_ = Rotation::random(rng_); }

    void set_env(int tz_minutes, std::optional<std::string> ip, NetworkStatus ns) {
        tz_ = tz_minutes;
        ip_ = std::move(ip);
        ns_ = ns;
    }

    void push(const std::array<double, 3>& accel_world, double heading_deg,
              double pressure_hpa) {
        std::normal_distribution<double> g(0.0, 1.0);
        SensorSample s;
        s.t = next_t_;
        const std::array<double, 3> total{accel_world[0], accel_world[1],
                                          accel_world[2] + kGravity};
        std::array<double, 3> dev = rot_.apply(total);
        for (int i = 0; i < 3; ++i)
            s.accel[i] = dev[i] + noise_.accel_sigma_ms2 * g(rng_);
        s.heading = norm360(heading_deg + noise_.heading_sigma_deg * g(rng_));
        s.pressure = pressure_hpa + noise_.pressure_sigma_hpa * g(rng_);
        s.tz_minutes = tz_;
        s.ip = ip_;
        s.ns = ns_;
        trace_.samples.push_back(std::move(s));
        next_t_ += dt_;
    }

    // A burst of hard jolts well past the partition threshold; the samples
    // open the chunk that follows, so roll the new attitude first.
    void transition(double heading_deg, double pressure_hpa) {
        begin_chunk();
        std::normal_distribution<double> g(0.0, 1.0);
        for (int k = 0; k < 3; ++k) {
            std::array<double, 3> dir{g(rng_), g(rng_), g(rng_)};
            const double len =
                std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
            std::array<double, 3> jolt{};
            if (len > 1e-9)
                for (int i = 0; i < 3; ++i) jolt[i] = 40.0 * dir[i] / len;
            else
                jolt[0] = 40.0;
            push(jolt, heading_deg, pressure_hpa);
        }
    }

    SensorTrace finish() {
        validate(trace_);
        return std::move(trace_);
    }

private:
    SensorTrace trace_;
    std::mt19937_64 rng_;
    NoiseParams noise_;
    double dt_;
    double next_t_ = 0.0;
    Rotation rot_;
    int tz_ = 0;
    std::optional<std::string> ip_;
    NetworkStatus ns_ = NetworkStatus::offline;
};

// ------------------------------------------------------------ route planning

// Random lattice route: straight runs of whole blocks joined by 90-degree
// corners, all on existing streets, never revisiting a vertex. Depth-first
// with backtracking, because a thinned grid has plenty of dead ends.
// Returns vertex indices in travel order, including the pass-through
// vertices inside each run.
class RoutePlanner {
public:
    RoutePlanner(const World& w, std::mt19937_64& rng, const RouteSpec& spec)
        : w_(w), rng_(rng), spec_(spec) {}

    std::vector<int> plan() {
        std::uniform_int_distribution<int> pick_vertex(0, w_.params.n_intersections - 1);
        for (int attempt = 0; attempt < 64; ++attempt) {
            const int start =
                spec_.start_vertex >= 0 ? spec_.start_vertex : pick_vertex(rng_);
            budget_ = 200000;
            route_.assign(1, start);
            visited_.assign(static_cast<std::size_t>(w_.params.n_intersections), 0);
            visited_[static_cast<std::size_t>(start)] = 1;
            for (int d : shuffled_dirs()) {
                if (!w_.has_street(start, d)) continue;
                if (legs(start % w_.cols, start / w_.cols, d, spec_.n_turns))
                    return route_;
            }
        }
        raise(errc::invariant_violation,
              "could not fit a route with the requested turns on this map");
    }

private:
    static constexpr int kDirs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}; // E N W S

    std::array<int, 4> shuffled_dirs() {
        std::array<int, 4> d{0, 1, 2, 3};
        std::shuffle(d.begin(), d.end(), rng_);
        return d;
    }

    // One straight run in direction d, then either done or a corner and
    // recursion. Run lengths and corner sides are tried in random order.
    bool legs(int col, int row, int d, int turns_left) {
        if (--budget_ < 0) return false;
        std::vector<int> lens(static_cast<std::size_t>(
            spec_.max_run_blocks - spec_.min_run_blocks + 1));
        for (std::size_t i = 0; i < lens.size(); ++i)
            lens[i] = spec_.min_run_blocks + static_cast<int>(i);
        std::shuffle(lens.begin(), lens.end(), rng_);

        const std::size_t mark = route_.size();
        for (int len : lens) {
            int c = col, r = row;
            bool ok = true;
            for (int step = 0; step < len; ++step) {
                const std::int32_t v = w_.vertex_at(c, r);
                if (!w_.has_street(v, d)) {
                    ok = false;
                    break;
                }
                c += kDirs[d][0];
                r += kDirs[d][1];
                const std::int32_t nv = w_.vertex_at(c, r);
                if (visited_[static_cast<std::size_t>(nv)]) {
                    ok = false;
                    break;
                }
                visited_[static_cast<std::size_t>(nv)] = 1;
                route_.push_back(nv);
            }
            if (ok) {
                if (turns_left == 0) return true;
                const int corner = w_.vertex_at(c, r);
                std::array<int, 2> sides{1, 3};
                if (std::uniform_int_distribution<int>(0, 1)(rng_))
                    std::swap(sides[0], sides[1]);
                for (int s : sides) {
                    const int nd = (d + s) % 4;
                    if (!w_.has_street(corner, nd)) continue;
                    if (legs(c, r, nd, turns_left - 1)) return true;
                }
            }
            for (std::size_t i = mark; i < route_.size(); ++i)
                visited_[static_cast<std::size_t>(route_[i])] = 0;
            route_.resize(mark);
        }
        return false;
    }

    const World& w_;
    std::mt19937_64& rng_;
    RouteSpec spec_;
    std::vector<int> route_;
    std::vector<char> visited_;
    long budget_ = 0;
};

std::vector<int> plan_lattice_route(const World& w, std::mt19937_64& rng,
                                    const RouteSpec& spec) {
    return RoutePlanner(w, rng, spec).plan();
}

// --------------------------------------------------------- ground kinematics

// Per-sample truth for a constant-speed ride along a vertex polyline, with
// idle bookends at both endpoints. Elevation runs linearly between vertex
// elevations by arc length; course is the chord bearing of the current leg.
struct GroundProfile {
    std::vector<double> course_deg;  // smoothed, per sample
    std::vector<double> elevation_m; // per sample
    std::vector<double> arc_m;       // distance traveled, 0 during lead-in
    std::vector<double> corner_t_s;  // when each interior vertex is passed
    std::vector<double> corner_sign; // +1 right turn, -1 left
    double motion_start_s = 0.0, motion_end_s = 0.0;
    double total_m = 0.0;
    std::size_t samples = 0;
};

GroundProfile ground_profile(const World& w, const std::vector<int>& route,
                             double speed_ms, double idle_s, double smooth_s,
                             double rate_hz) {
    GroundProfile gp;
    const std::size_t nv = route.size();
    std::vector<double> lat(nv), lon(nv), ele(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        const Vertex& v = w.graph.vertices[static_cast<std::size_t>(route[i])];
        lat[i] = v.lat;
        lon[i] = v.lon;
        ele[i] = v.elevation_m;
    }
    std::vector<double> cum(nv, 0.0), bear(nv - 1, 0.0);
    for (std::size_t i = 0; i + 1 < nv; ++i) {
        cum[i + 1] = cum[i] + haversine_m(lat[i], lon[i], lat[i + 1], lon[i + 1]);
        bear[i] = chord_bearing_deg(lat[i], lon[i], lat[i + 1], lon[i + 1]);
    }
    gp.total_m = cum.back();
    gp.motion_start_s = idle_s;
    gp.motion_end_s = idle_s + gp.total_m / speed_ms;
    const double total_s = gp.motion_end_s + idle_s;
    const double dt = 1.0 / rate_hz;
    gp.samples = static_cast<std::size_t>(std::floor(total_s / dt)) + 1;

    std::vector<double> raw_course(gp.samples);
    gp.elevation_m.resize(gp.samples);
    gp.arc_m.resize(gp.samples);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < gp.samples; ++k) {
        const double t = k * dt;
        double d = std::clamp((t - idle_s) * speed_ms, 0.0, gp.total_m);
        while (seg + 2 < nv && cum[seg + 1] <= d) ++seg;
        const double span = cum[seg + 1] - cum[seg];
        const double f = span > 0 ? (d - cum[seg]) / span : 0.0;
        raw_course[k] = bear[seg];
        gp.elevation_m[k] = ele[seg] + f * (ele[seg + 1] - ele[seg]);
        gp.arc_m[k] = d;
    }
    std::vector<double> u = signals::unwrap_degrees(raw_course);
    const std::size_t win = static_cast<std::size_t>(
        std::max(1.0, std::round(smooth_s * rate_hz)));
    gp.course_deg = signals::moving_mean(u, win);

    for (std::size_t i = 1; i + 1 < nv; ++i) {
        const double turn = wrap180(bear[i] - bear[i - 1]);
        if (std::abs(turn) < 1.0) continue; // pass-through vertex
        gp.corner_t_s.push_back(idle_s + cum[i] / speed_ms);
        gp.corner_sign.push_back(turn > 0 ? 1.0 : -1.0);
    }
    return gp;
}

std::array<double, 3> heading_vector(double course_deg, double along,
                                     double right) {
    const double c = deg2rad(course_deg);
    // along the course and 90 degrees clockwise of it, in the horizontal plane
    return {along * std::sin(c) + right * std::sin(c + kPi / 2.0),
            along * std::cos(c) + right * std::cos(c + kPi / 2.0), 0.0};
}

TruthLeg ground_truth_leg(const World& w, const std::vector<int>& route,
                          ActivityLabel activity, double start_t, double end_t,
                          double total_m) {
    TruthLeg leg;
    leg.activity = activity;
    leg.start_t_s = start_t;
    leg.end_t_s = end_t;
    leg.distance_m = total_m;
    for (int v : route) {
        const Vertex& vx = w.graph.vertices[static_cast<std::size_t>(v)];
        leg.node_ids.push_back(vx.node_id);
        leg.path.emplace_back(vx.lat, vx.lon);
    }
    return leg;
}

// Driving: steady cruise with gentle vibration, a brake pulse into every
// corner, the centripetal push through it, and a pull away from it.
TruthLeg emit_drive(TraceBuilder& tb, const World& w, const std::vector<int>& route) {
    constexpr double kSpeed = 10.0, kIdle = 5.0, kSmooth = 4.0;
    constexpr double kVib = 0.3, kPulse = 1.2, kPulseLen = 3.0, kLateral = 2.0;
    const double rate = 1.0 / tb.dt();
    GroundProfile gp = ground_profile(w, route, kSpeed, kIdle, kSmooth, rate);
    std::normal_distribution<double> g(0.0, 1.0);
    const double t0 = tb.t();

    for (std::size_t k = 0; k < gp.samples; ++k) {
        const double t = k * tb.dt();
        std::array<double, 3> a{};
        const bool moving = t > gp.motion_start_s && t < gp.motion_end_s;
        if (moving)
            for (int i = 0; i < 3; ++i) a[i] = kVib * g(tb.rng());
        double along = 0.0, right = 0.0;
        for (std::size_t c = 0; c < gp.corner_t_s.size(); ++c) {
            const double tc = gp.corner_t_s[c];
            if (t >= tc - kSmooth / 2 - kPulseLen && t < tc - kSmooth / 2)
                along -= kPulse;
            if (t >= tc + kSmooth / 2 && t < tc + kSmooth / 2 + kPulseLen)
                along += kPulse;
            if (t >= tc - kSmooth / 2 && t < tc + kSmooth / 2)
                right += kLateral * gp.corner_sign[c];
        }
        if (moving && (along != 0.0 || right != 0.0)) {
            const std::array<double, 3> push =
                heading_vector(gp.course_deg[k], along, right);
            for (int i = 0; i < 3; ++i) a[i] += push[i];
        }
        tb.push(a, gp.course_deg[k],
                elevation_to_pressure(gp.elevation_m[k], w.weather));
    }
    return ground_truth_leg(w, route, ActivityLabel::driving, t0,
                            t0 + (gp.samples - 1) * tb.dt(), gp.total_m);
}

// Walking: the same geometry at stride pace with a strong vertical bounce at
// gait frequency; each bounce cycle is one step.
TruthLeg emit_walk(TraceBuilder& tb, const World& w, const std::vector<int>& route) {
    constexpr double kCadence = 1.9, kStride = 0.75, kBounce = 2.5;
    constexpr double kIdle = 5.0, kSmooth = 2.0;
    const double speed = kCadence * kStride;
    const double rate = 1.0 / tb.dt();
    GroundProfile gp = ground_profile(w, route, speed, kIdle, kSmooth, rate);
    const double t0 = tb.t();

    for (std::size_t k = 0; k < gp.samples; ++k) {
        const double t = k * tb.dt();
        std::array<double, 3> a{};
        if (t > gp.motion_start_s && t < gp.motion_end_s)
            a[2] = kBounce * std::sin(2.0 * kPi * kCadence * (t - gp.motion_start_s));
        tb.push(a, gp.course_deg[k],
                elevation_to_pressure(gp.elevation_m[k], w.weather));
    }
    TruthLeg leg = ground_truth_leg(w, route, ActivityLabel::walking, t0,
                                    t0 + (gp.samples - 1) * tb.dt(), gp.total_m);
    leg.steps = static_cast<std::size_t>(
        std::floor((gp.motion_end_s - gp.motion_start_s) * kCadence));
    return leg;
}

void emit_idle(TraceBuilder& tb, double duration_s, double heading_deg,
               double pressure_hpa) {
    const std::size_t n =
        static_cast<std::size_t>(std::floor(duration_s / tb.dt())) + 1;
    for (std::size_t k = 0; k < n; ++k) tb.push({}, heading_deg, pressure_hpa);
}

// Flight timeline, gate to gate. Returns {gate-out, gate-in} in trace time.
struct FlightTimes {
    double gate_out_s = 0.0, gate_in_s = 0.0;
};

FlightTimes emit_flight(TraceBuilder& tb, const AirportRecord& dep,
                        const AirportRecord& dst, const WeatherReport& wx_dep,
                        const WeatherReport& wx_dst, double duration_s) {
    constexpr double kQuiet = 60.0, kTaxiOut = 300.0, kRoll = 30.0;
    constexpr double kClimb = 600.0, kDescent = 600.0, kTouch = 10.0;
    constexpr double kTaxiIn = 240.0, kCabin = 2100.0;
    const double cruise =
        duration_s - (kTaxiOut + kRoll + kClimb + kDescent + kTouch + kTaxiIn);
    if (cruise < 300.0)
        raise(errc::invariant_violation,
              "flight too short for a full phase profile");

    std::normal_distribution<double> g(0.0, 1.0);
    const double heading = chord_bearing_deg(dep.lat, dep.lon, dst.lat, dst.lon);
    const double t0 = tb.t();
    const auto rel = [&] { return tb.t() - t0; };

    FlightTimes times;
    times.gate_out_s = t0 + kQuiet;
    times.gate_in_s = t0 + kQuiet + duration_s;
    const double t_roll = kQuiet + kTaxiOut;
    const double t_climb = t_roll + kRoll;
    const double t_cruise = t_climb + kClimb;
    const double t_descent = t_cruise + cruise;
    const double t_touch = t_descent + kDescent;
    const double t_taxi_in = t_touch + kTouch;
    const double t_end = t_taxi_in + kTaxiIn + kQuiet;
    const double tz_flip = t_touch + kTouch + 60.0;

    while (rel() < t_end) {
        const double t = rel();
        double vib = 0.0, along = 0.0, h = dep.elevation_m;
        const WeatherReport* wx = &wx_dep;
        if (t < kQuiet) {
            // parked at the gate
        } else if (t < t_roll) {
            vib = 0.75;
        } else if (t < t_climb) {
            vib = 0.6;
            along = 3.0;
        } else if (t < t_cruise) {
            vib = 0.6;
            h = dep.elevation_m + (t - t_climb) / kClimb * (kCabin - dep.elevation_m);
        } else if (t < t_descent) {
            vib = 0.2;
            h = kCabin;
        } else if (t < t_touch) {
            vib = 0.6;
            h = kCabin + (t - t_descent) / kDescent * (dst.elevation_m - kCabin);
            wx = &wx_dst;
        } else if (t < t_taxi_in) {
            vib = 0.6;
            along = -3.0;
            h = dst.elevation_m;
            wx = &wx_dst;
        } else if (t < t_taxi_in + kTaxiIn) {
            vib = 0.75;
            h = dst.elevation_m;
            wx = &wx_dst;
        } else {
            h = dst.elevation_m;
            wx = &wx_dst;
        }
        std::array<double, 3> a = heading_vector(heading, along, 0.0);
        for (int i = 0; i < 3; ++i) a[i] += vib * g(tb.rng());
        tb.set_env(t >= tz_flip ? dst.tz_minutes : dep.tz_minutes, std::nullopt,
                   NetworkStatus::offline);
        tb.push(a, heading, elevation_to_pressure(h, *wx));
    }
    return times;
}

TruthLeg flight_truth_leg(const AirportRecord& dep, const AirportRecord& dst,
                          double start_t, double end_t) {
    TruthLeg leg;
    leg.activity = ActivityLabel::plane;
    leg.start_t_s = start_t;
    leg.end_t_s = end_t;
    leg.places = {dep.code, dst.code};
    leg.path = {{dep.lat, dep.lon}, {dst.lat, dst.lon}};
    leg.distance_m = haversine_m(dep.lat, dep.lon, dst.lat, dst.lon);
    return leg;
}

// Train ride over one timetable run: platform wait, then roll/dwell cycles
// at the scheduled times, with a speed-change shove at each end of a roll.
TruthLeg emit_train(TraceBuilder& tb, const World& w, const TrainRun& run,
                    double platform_wait_s) {
    constexpr double kVib = 0.62, kShove = 1.5, kShoveLen = 5.0, kTail = 90.0;
    if (run.stops.size() < 2)
        raise(errc::invariant_violation, "train run needs two stops");
    double track = 0.0;
    if (auto it = w.train_headings.find(run.origin());
        it != w.train_headings.end() && !it->second.empty())
        track = it->second.front();
    std::uniform_real_distribution<double> off(-5.0, 5.0);
    const double heading = norm360(track + off(tb.rng()));
    const double pressure = elevation_to_pressure(0.0, w.weather);
    std::normal_distribution<double> g(0.0, 1.0);

    const double t0 = tb.t();
    const std::int64_t board = run.stops.front().depart_epoch_s -
                               static_cast<std::int64_t>(platform_wait_s);
    auto rel = [&](std::int64_t epoch) {
        return t0 + static_cast<double>(epoch - board);
    };
    const double t_end = rel(run.stops.back().arrive_epoch_s) + kTail;

    while (tb.t() < t_end) {
        const double t = tb.t();
        double vib = 0.0, along = 0.0;
        for (std::size_t i = 0; i + 1 < run.stops.size(); ++i) {
            const double go = rel(run.stops[i].depart_epoch_s);
            const double stop = rel(run.stops[i + 1].arrive_epoch_s);
            if (t < go || t >= stop) continue;
            vib = kVib;
            if (t < go + kShoveLen) along = kShove;
            if (t >= stop - kShoveLen) along = -kShove;
        }
        std::array<double, 3> a = heading_vector(heading, along, 0.0);
        for (int i = 0; i < 3; ++i) a[i] += vib * g(tb.rng());
        tb.push(a, heading, pressure);
    }

    TruthLeg leg;
    leg.activity = ActivityLabel::train;
    leg.start_t_s = t0;
    leg.end_t_s = tb.t() - tb.dt();
    for (const TrainStop& s : run.stops) leg.places.push_back(s.station);
    return leg;
}

int nearest_vertex(const World& w, double lat, double lon) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.graph.vertices.size(); ++i) {
        const Vertex& v = w.graph.vertices[i];
        const double d = haversine_m(lat, lon, v.lat, v.lon);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double vertex_pressure(const World& w, int v) {
    return elevation_to_pressure(
        w.graph.vertices[static_cast<std::size_t>(v)].elevation_m, w.weather);
}

} // namespace

// ------------------------------------------------------------ public wrappers

SynthResult gen_drive(const World& w, std::uint64_t seed, const RouteSpec& spec,
                      double rate_hz, const NoiseParams& noise) {
    TraceBuilder tb(seed, rate_hz, noise, kDayAnchor);
    tb.set_env(w.params.tz_minutes, std::nullopt, NetworkStatus::offline);
    tb.begin_chunk();
    const std::vector<int> route = plan_lattice_route(w, tb.rng(), spec);
    SynthResult r;
    r.start_city = w.params.name;
    r.legs.push_back(emit_drive(tb, w, route));
    r.trace = tb.finish();
    return r;
}

SynthResult gen_walk(const World& w, std::uint64_t seed, const RouteSpec& spec,
                     double rate_hz, const NoiseParams& noise) {
    TraceBuilder tb(seed, rate_hz, noise, kDayAnchor);
    tb.set_env(w.params.tz_minutes, std::nullopt, NetworkStatus::offline);
    tb.begin_chunk();
    const std::vector<int> route = plan_lattice_route(w, tb.rng(), spec);
    SynthResult r;
    r.start_city = w.params.name;
    r.legs.push_back(emit_walk(tb, w, route));
    r.trace = tb.finish();
    return r;
}

SynthResult gen_flight(const AirportRecord& dep, const AirportRecord& dst,
                       const WeatherReport& wx_dep, const WeatherReport& wx_dst,
                       const FlightEntry& entry, std::uint64_t seed, double rate_hz,
                       const NoiseParams& noise) {
    const double duration_s =
        static_cast<double>(entry.landing_epoch_s - entry.takeoff_epoch_s);
    TraceBuilder tb(seed, rate_hz, noise, entry.takeoff_epoch_s - 60);
    tb.set_env(dep.tz_minutes, std::nullopt, NetworkStatus::offline);
    tb.begin_chunk();
    const FlightTimes ft = emit_flight(tb, dep, dst, wx_dep, wx_dst, duration_s);
    SynthResult r;
    r.legs.push_back(flight_truth_leg(dep, dst, ft.gate_out_s, ft.gate_in_s));
    r.trace = tb.finish();
    return r;
}

SynthResult gen_train(const World& w, const TrainRun& run, std::uint64_t seed,
                      double rate_hz, const NoiseParams& noise) {
    TraceBuilder tb(seed, rate_hz, noise, 0);
    tb.set_env(w.params.tz_minutes, std::nullopt, NetworkStatus::offline);
    tb.begin_chunk();
    std::uniform_real_distribution<double> wait(60.0, 180.0);
    const double platform_wait_s = std::floor(wait(tb.rng()));
    SynthResult r;
    r.start_city = w.params.name;
    r.legs.push_back(emit_train(tb, w, run, platform_wait_s));
    r.trace = tb.finish();
    r.trace.anchor_epoch_s = run.stops.front().depart_epoch_s -
                             static_cast<std::int64_t>(platform_wait_s);
    return r;
}

SynthResult gen_stationary(double elevation_m, const WeatherReport& wx,
                           double duration_s, std::uint64_t seed, double rate_hz,
                           const NoiseParams& noise) {
    TraceBuilder tb(seed, rate_hz, noise, kDayAnchor);
    tb.set_env(0, std::nullopt, NetworkStatus::offline);
    tb.begin_chunk();
    std::uniform_real_distribution<double> hd(0.0, 360.0);
    emit_idle(tb, duration_s, hd(tb.rng()), elevation_to_pressure(elevation_m, wx));
    SynthResult r;
    TruthLeg leg;
    leg.activity = ActivityLabel::unrecognized;
    leg.start_t_s = 0.0;
    leg.end_t_s = duration_s;
    r.legs.push_back(leg);
    r.trace = tb.finish();
    return r;
}

// ------------------------------------------------------------------ full days

DayScenario gen_day_drive_walk(std::uint64_t seed) {
    DayScenario day;
    CityParams cp;
    cp.seed = seed * 2 + 1;
    cp.name = "alta";
    cp.n_intersections = 441; // 21 x 21
    day.cities.push_back(gen_city(cp));
    const World& w = day.cities.front();

    TraceBuilder tb(seed, 5.0, NoiseParams{}, kDayAnchor);

    RouteSpec drive_spec;
    drive_spec.n_turns = 6;
    const std::vector<int> drive_route = plan_lattice_route(w, tb.rng(), drive_spec);
    RouteSpec walk_spec;
    walk_spec.n_turns = 3;
    walk_spec.min_run_blocks = 1;
    walk_spec.max_run_blocks = 2;
    walk_spec.start_vertex = drive_route.back();
    const std::vector<int> walk_route = plan_lattice_route(w, tb.rng(), walk_spec);

    SynthResult& r = day.day;
    r.start_city = w.params.name;

    // home: connected and idle, which pins the day's starting city
    tb.set_env(w.params.tz_minutes, w.home_ip, NetworkStatus::wifi);
    tb.begin_chunk();
    emit_idle(tb, 120.0, 135.0, vertex_pressure(w, drive_route.front()));

    tb.set_env(w.params.tz_minutes, std::nullopt, NetworkStatus::offline);
    tb.transition(135.0, vertex_pressure(w, drive_route.front()));
    r.legs.push_back(emit_drive(tb, w, drive_route));

    tb.transition(90.0, vertex_pressure(w, walk_route.front()));
    r.legs.push_back(emit_walk(tb, w, walk_route));

    r.trace = tb.finish();
    return day;
}

DayScenario gen_day_flight(std::uint64_t seed) {
    DayScenario day;
    CityParams ap;
    ap.seed = seed * 2 + 1;
    ap.name = "alta";
    ap.n_intersections = 144;
    ap.tz_minutes = 0;
    ap.ip_octet = 1;
    CityParams bp;
    bp.seed = seed * 2 + 2;
    bp.name = "brio";
    bp.n_intersections = 144;
    bp.origin_lat = 47.0;
    bp.origin_lon = 12.0;
    bp.tz_minutes = 60;
    bp.ip_octet = 2;
    day.cities.push_back(gen_city(ap));
    day.cities.push_back(gen_city(bp));
    World& alta = day.cities[0];
    World& brio = day.cities[1];

    const AirportRecord dep = add_airport(alta, "AAA", 350.0, 250.0, 8.0);
    const AirportRecord dst = add_airport(brio, "BBB", -300.0, 200.0, 160.0);

    TraceBuilder tb(seed, 5.0, NoiseParams{}, kDayAnchor);

    RouteSpec drive_spec;
    drive_spec.n_turns = 5;
    const std::vector<int> drive_route = plan_lattice_route(alta, tb.rng(), drive_spec);
    RouteSpec walk1_spec;
    walk1_spec.n_turns = 2;
    walk1_spec.max_run_blocks = 2;
    walk1_spec.start_vertex = drive_route.back();
    const std::vector<int> walk1_route = plan_lattice_route(alta, tb.rng(), walk1_spec);
    RouteSpec walk2_spec;
    walk2_spec.n_turns = 3;
    walk2_spec.max_run_blocks = 2;
    walk2_spec.start_vertex = nearest_vertex(brio, dst.lat, dst.lon);
    const std::vector<int> walk2_route = plan_lattice_route(brio, tb.rng(), walk2_spec);

    SynthResult& r = day.day;
    r.start_city = alta.params.name;

    tb.set_env(alta.params.tz_minutes, alta.home_ip, NetworkStatus::wifi);
    tb.begin_chunk();
    emit_idle(tb, 120.0, 200.0, vertex_pressure(alta, drive_route.front()));

    tb.set_env(alta.params.tz_minutes, std::nullopt, NetworkStatus::offline);
    tb.transition(200.0, vertex_pressure(alta, drive_route.front()));
    r.legs.push_back(emit_drive(tb, alta, drive_route));

    tb.transition(90.0, vertex_pressure(alta, walk1_route.front()));
    r.legs.push_back(emit_walk(tb, alta, walk1_route));

    tb.transition(45.0, elevation_to_pressure(dep.elevation_m, alta.weather));
    const FlightTimes ft =
        emit_flight(tb, dep, dst, alta.weather, brio.weather, 3000.0);
    add_flight(alta, dep, dst,
               kDayAnchor + static_cast<std::int64_t>(std::llround(ft.gate_out_s)),
               kDayAnchor + static_cast<std::int64_t>(std::llround(ft.gate_in_s)));
    r.legs.push_back(flight_truth_leg(dep, dst, ft.gate_out_s, ft.gate_in_s));

    tb.set_env(brio.params.tz_minutes, std::nullopt, NetworkStatus::offline);
    tb.transition(270.0, vertex_pressure(brio, walk2_route.front()));
    r.legs.push_back(emit_walk(tb, brio, walk2_route));

    r.trace = tb.finish();
    return day;
}

void write_truth_json(const SynthResult& r, std::ostream& out) {
    ordered_json root;
    root["start_city"] = r.start_city;
    root["segments"] = ordered_json::array();
    for (const TruthLeg& leg : r.legs) {
        ordered_json j;
        j["activity"] = to_string(leg.activity);
        j["start_t_s"] = leg.start_t_s;
        j["end_t_s"] = leg.end_t_s;
        j["node_ids"] = leg.node_ids;
        ordered_json path = ordered_json::array();
        for (const auto& [lat, lon] : leg.path)
            path.push_back(ordered_json::array({lat, lon}));
        j["path"] = std::move(path);
        j["distance_m"] = leg.distance_m;
        j["places"] = leg.places;
        j["steps"] = leg.steps;
        root["segments"].push_back(std::move(j));
    }
    out << root.dump(2) << '\n';
}

} // namespace pintrack::synth
