#pragma once

#include "pintrack/auxdata.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace pintrack {

// Square search seed: routes must start within half_side_m of (lat, lon)
// along both axes.
struct SeedArea {
    double lat = 0.0;
    double lon = 0.0;
    double half_side_m = 150.0;
};

struct CandidatePath {
    std::vector<std::uint32_t> vertices;  // graph vertex indices, in travel order
    double error = 0.0;                   // weighted residual, lower is better
    double elev_residual_m = 0.0;
    double turn_residual_deg = 0.0;
};

struct RankedRoutes {
    std::vector<CandidatePath> paths;        // sorted by (error, vertex sequence)
    std::vector<std::size_t> roots_per_turn; // distinct start vertices alive after each turn
    std::vector<std::size_t> paths_per_turn; // live leaves after each turn
};

// One observed turn: where the heading swung to a new plateau, by how much,
// and the elevation read at the settle point. steps counts strides taken
// since the previous turn (ignored unless step gating is on); duration_s is
// the time since the previous turn (unset for the first).
struct LegObservation {
    double delta_deg = 0.0;
    double elevation_m = 0.0;
    double steps = 0.0;
    double duration_s = 0.0;
};

// The stream's entry/exit context: settled heading and elevation at the
// chunk boundary, strides before the first / after the last turn, and the
// wall-clock window between the stream boundary and that turn.
struct EndObservation {
    double heading_deg = 0.0;
    double elevation_m = 0.0;
    double steps = 0.0;
    double window_s = 0.0;
};

struct SearchConfig {
    double tol_elev_m = 3.0;
    double tol_turn_deg = 20.0;
    double w_elev = -1.0;            // <= 0 means 1 / tol_elev_m
    double w_turn = -1.0;            // <= 0 means 1 / tol_turn_deg
    double straight_tol_deg = 20.0;  // what still counts as going straight
    double bearing_tol_deg = 20.0;   // end heading vs road bearing
    int max_chain_edges = 8;         // longest straight run between turns
    bool use_step_gate = false;
    double step_min_m = 0.4;
    double step_max_m = 1.2;
    // Speed-feasibility gate: every leg length over its duration must admit
    // one common travel speed, within a variability factor. The factor must
    // stay below sqrt(3/2) or block-grid legs one block apart in length pass
    // for each other. The end runs see only an upper bound (the stream may
    // idle near its boundaries).
    bool use_speed_gate = false;
    double speed_var = 1.18;
    double end_speed_lo = 0.4;       // end run speed >= this fraction of fitted
    double time_quantum_s = 0.0;     // timing uncertainty, one sample spacing
};

// Walks the road graph matching the observed turn sequence. Candidate
// routes survive only while every turn lands on a vertex whose elevation
// and exit angle agree with the stream within tolerance.
RankedRoutes match_route(const RoadGraph& graph, const std::vector<LegObservation>& legs,
                         const EndObservation& entry, const EndObservation& exit,
                         const std::optional<SeedArea>& seed, const SearchConfig& cfg);

} // namespace pintrack
