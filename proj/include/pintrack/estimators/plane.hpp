#pragma once

#include "pintrack/auxdata.hpp"
#include "pintrack/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pintrack {

// Flight phase anchors, in chunk-relative seconds. A flight reads as
// taxi-out, takeoff roll, sustained cabin pressure drop, cruise, sustained
// rise, touchdown, taxi-in; gate-to-gate spans the two taxi phases.
struct FlightPhases {
    double t_gate_departure = 0.0; // taxi-out starts
    double t_takeoff = 0.0;        // takeoff roll starts
    double t_climb_end = 0.0;      // cabin pressure settles at cruise
    double t_descent = 0.0;        // cabin pressure starts rising
    double t_landing = 0.0;        // descent ends (touchdown)
    double t_gate_arrival = 0.0;   // taxi-in ends

    int tz_dep_minutes = 0, tz_dst_minutes = 0;
    double pressure_dep_hpa = 0.0, pressure_dst_hpa = 0.0;

    double duration_min() const { return (t_gate_arrival - t_gate_departure) / 60.0; }
};

struct PhaseConfig {
    double climb_rate_ms = 2.0;     // cabin-equivalent vertical rate
    double climb_sustain_s = 30.0;
    double rate_span_s = 5.0;       // differentiation span
    double smooth_s = 10.0;
    double min_cruise_s = 300.0;
    double activity_thresh_ms2 = 1.1; // rolling specific force of taxi motion
    double activity_gap_s = 60.0;     // quiet shorter than this stays in a phase
    double roll_thresh_ms2 = 2.2;     // takeoff roll / touchdown braking level
    double roll_window_s = 5.0;
};

FlightPhases detect_flight_phases(const DataChunk& chunk, const PhaseConfig& cfg = {});

// What the matcher consumes: boundary timezones, gate elevations read
// through each end's weather report, and absolute gate times.
struct FlightFeatures {
    int tz_dep_minutes = 0, tz_dst_minutes = 0;
    double elev_dep_m = 0.0, elev_dst_m = 0.0;
    std::int64_t takeoff_epoch_s = 0; // gate departure, absolute
    std::int64_t landing_epoch_s = 0; // gate arrival, absolute
    double duration_min = 0.0;
};

FlightFeatures flight_features(const DataChunk& chunk, const FlightPhases& phases,
                               const WeatherReport& weather_dep,
                               const WeatherReport& weather_dst);

struct FlightCandidate {
    std::string dep, dst;
    double error = 0.0;
    std::optional<FlightEntry> entry; // set when matched against a timetable
};

struct PlaneConfig {
    double tol_elev_m = 5.0;
    double tol_duration_min = 60.0;
    double tol_time_min = 60.0;   // timetable takeoff/landing slack
    double w_elev = -1.0;         // <= 0 means 1 / tol_elev_m
    double w_duration = -1.0;     // <= 0 means 1 / tol_duration_min
    bool use_timetable = true;
    double cruise_kmh = 850.0;    // duration model when no timetable
    double overhead_min = 30.0;
};

// Ranks airport pairs (and timetable entries when enabled) against the
// observed flight. known_dep pins the departure airport.
std::vector<FlightCandidate> match_flights(const FlightFeatures& obs,
                                           const std::vector<AirportRecord>& airports,
                                           const std::vector<FlightEntry>& flights,
                                           const PlaneConfig& cfg = {},
                                           const std::optional<std::string>& known_dep = {});

std::vector<FlightCandidate> plane_tracker(const DataChunk& chunk,
                                           const std::vector<AirportRecord>& airports,
                                           const std::vector<FlightEntry>& flights,
                                           const WeatherReport& weather_dep,
                                           const WeatherReport& weather_dst,
                                           const PlaneConfig& cfg = {},
                                           const std::optional<std::string>& known_dep = {});

// Great-circle duration model used when no timetable is available.
double modeled_duration_min(const AirportRecord& dep, const AirportRecord& dst,
                            const PlaneConfig& cfg);

} // namespace pintrack
