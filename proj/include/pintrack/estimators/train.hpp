#pragma once

#include "pintrack/auxdata.hpp"
#include "pintrack/trace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pintrack {

// What a train ride yields: how long the train rolled between successive
// stops, when it left the first station, and which way it pulled out.
struct TravelIntervals {
    std::vector<double> minutes;          // stop-to-stop travel times
    std::int64_t departure_epoch_s = 0;   // leaving the boarding station
    double initial_heading_deg = 0.0;     // settled heading while pulling out
    std::vector<double> stop_t_s;         // chunk-relative arrival times
};

struct TrainStopConfig {
    double move_thresh_ms2 = 1.1;  // rolling specific force while rolling
    double roll_window_s = 5.0;
    double merge_gap_s = 15.0;     // vibration lulls shorter than this stay "moving"
    double min_dwell_s = 20.0;     // stationary runs at least this long are stops
    double heading_span_s = 60.0;  // settled heading average after departure
};

TravelIntervals extract_travel_intervals(const DataChunk& chunk,
                                         const TrainStopConfig& cfg = {});

struct TrainCandidate {
    std::string train_id;
    std::vector<std::string> stations; // boarding station through last stop seen
    double d_minutes = 0.0;            // total interval mismatch
};

struct TrainConfig {
    double departure_window_min = 60.0;
    double d_per_interval_min = 2.0; // mismatch budget per interval, strict
    double heading_tol_deg = 30.0;
};

// Matches the interval pattern against every run in the timetable whose
// departure falls inside the window and whose origin has a track heading
// compatible with how the ride pulled out.
std::vector<TrainCandidate> train_tracker(const TravelIntervals& obs,
                                          const TrainTimetable& timetable,
                                          const TrainHeadings& headings,
                                          const TrainConfig& cfg = {});

} // namespace pintrack
