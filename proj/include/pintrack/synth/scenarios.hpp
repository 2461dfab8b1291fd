#pragma once

#include "pintrack/synth/world.hpp"
#include "pintrack/trace.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pintrack::synth {

struct NoiseParams {
    double heading_sigma_deg = 3.0;
    double pressure_sigma_hpa = 0.12;
    double accel_sigma_ms2 = 0.5;

    static NoiseParams off() { return {0.0, 0.0, 0.0}; }
};

// What actually happened, leg by leg. Written next to every generated trace
// so estimates can be scored without peeking at the generator.
struct TruthLeg {
    ActivityLabel activity = ActivityLabel::unrecognized;
    double start_t_s = 0.0, end_t_s = 0.0;
    std::vector<std::int64_t> node_ids;           // visited map nodes
    std::vector<std::pair<double, double>> path;  // lat, lon
    double distance_m = 0.0;
    std::vector<std::string> places;              // airports or stations
    std::size_t steps = 0;                        // strides, walking legs
};

struct SynthResult {
    SensorTrace trace;
    std::vector<TruthLeg> legs;
    std::string start_city;
};

// Lattice route shape for ground legs: runs of whole blocks joined by
// 90-degree corners.
struct RouteSpec {
    int n_turns = 6;
    int min_run_blocks = 1;
    int max_run_blocks = 3;
    int start_vertex = -1;  // -1 picks one at random
};

SynthResult gen_drive(const World& w, std::uint64_t seed, const RouteSpec& spec,
                      double rate_hz, const NoiseParams& noise);

SynthResult gen_walk(const World& w, std::uint64_t seed, const RouteSpec& spec,
                     double rate_hz, const NoiseParams& noise);

// One flight following a timetable entry, gate to gate, with the cabin
// pressure profile and the timezone flip after touchdown.
SynthResult gen_flight(const AirportRecord& dep, const AirportRecord& dst,
                       const WeatherReport& wx_dep, const WeatherReport& wx_dst,
                       const FlightEntry& entry, std::uint64_t seed, double rate_hz,
                       const NoiseParams& noise);

// One ride over a timetable run: board at the origin, roll between the
// scheduled stops, leave the device quiet at each dwell.
SynthResult gen_train(const World& w, const TrainRun& run, std::uint64_t seed,
                      double rate_hz, const NoiseParams& noise);

SynthResult gen_stationary(double elevation_m, const WeatherReport& wx,
                           double duration_s, std::uint64_t seed, double rate_hz,
                           const NoiseParams& noise);

// Full-day itineraries, including the aux data that explains them. The trace
// opens with a WiFi-connected idle stretch at home so the day is anchored to
// the starting city.
struct DayScenario {
    std::vector<World> cities;
    SynthResult day;
};

// drive across town, then walk onward from where the car stopped
DayScenario gen_day_drive_walk(std::uint64_t seed);
// drive, walk to the airport, fly to the second city, walk from the airport
DayScenario gen_day_flight(std::uint64_t seed);

void write_truth_json(const SynthResult& r, std::ostream& out);

} // namespace pintrack::synth
