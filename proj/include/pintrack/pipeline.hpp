#pragma once

#include "pintrack/config.hpp"
#include "pintrack/trace.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pintrack {

// One reconstructed stretch of the day. Driving and walking carry road
// geometry; flights carry the two airport endpoints; train rides carry
// station names only (the timetable holds no coordinates). Chunks that
// could not be resolved become gap segments so coverage still adds up.
struct TrajectorySegment {
    ActivityLabel activity = ActivityLabel::unrecognized;
    double start_t_s = 0.0, end_t_s = 0.0;
    std::string estimator;                         // car|walk|plane|train|gap
    std::vector<std::pair<double, double>> path;   // lat, lon
    std::vector<std::string> places;               // airport codes or stations
    double error = 0.0;                            // best candidate's score
    std::size_t candidates = 0;                    // ranked alternatives kept
    std::string note;                              // failure code for gaps
};

struct CandidateRow {
    std::size_t segment = 0;
    std::size_t turn = 0;   // 1-based turn number within the segment
    std::size_t roots = 0;  // distinct start vertices still alive
    std::size_t paths = 0;  // full hypotheses still alive
};

struct Trajectory {
    std::string initial_city;
    std::vector<TrajectorySegment> segments;       // time-ordered
    std::vector<CandidateRow> candidate_series;
};

// The full chain: partition, classify, estimate per activity, threading the
// current city and the previous endpoint (as a 300 m x 300 m seed box)
// through the day.
Trajectory run_pinme(const SensorTrace& trace, const std::string& aux_root,
                     const RunConfig& cfg);

void write_trajectory_geojson(const Trajectory& t, std::ostream& out);
void write_candidates_csv(const Trajectory& t, std::ostream& out);

// Reads back what write_trajectory_geojson produced (candidate series is not
// part of the file and comes back empty).
Trajectory load_trajectory_geojson(std::istream& in);
Trajectory load_trajectory_geojson_file(const std::string& path);

// ------------------------------------------------------------------- scoring

// Ground truth is the generator's log: per-segment activity, timing, true
// geometry and distance.
struct TruthSegment {
    ActivityLabel activity = ActivityLabel::unrecognized;
    double start_t_s = 0.0, end_t_s = 0.0;
    std::vector<std::pair<double, double>> path;
    std::vector<std::string> places;
    double distance_m = 0.0;
};

struct SegmentScore {
    ActivityLabel activity = ActivityLabel::unrecognized;
    double endpoint_error_m = 0.0;
    double approx_error = 0.0;  // endpoint error over true traveled distance
    bool route_correct = false; // geometry (or place list) matches exactly
    bool matched = false;       // a truth segment overlapped this estimate
};

struct Metrics {
    std::vector<SegmentScore> segments;
    double mean_approx_error = 0.0; // over matched driving/walking segments
    std::size_t route_correct_count = 0;
    std::size_t matched_count = 0;
    std::size_t gap_count = 0;
};

std::vector<TruthSegment> load_ground_truth(std::istream& in);
std::vector<TruthSegment> load_ground_truth_file(const std::string& path);

// Scores estimates against truth by time overlap. Misaligned when a
// non-gap estimate overlaps no truth segment of the same activity.
Metrics evaluate(const Trajectory& t, const std::vector<TruthSegment>& truth);

void write_metrics_json(const Metrics& m, std::ostream& out);

} // namespace pintrack
