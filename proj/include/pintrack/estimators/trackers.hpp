#pragma once

#include "pintrack/auxdata.hpp"
#include "pintrack/estimators/routes.hpp"
#include "pintrack/trace.hpp"
#include "pintrack/estimators/turns.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pintrack {

// ------------------------------------------------------------------ driving

struct CarConfig {
    TurnConfig turns;
    SearchConfig search;
};

// Locates a driving chunk on the road graph from turn-point elevations
// (via the city weather report) and turn angles. The chunk must carry a
// driving label if labeled at all.
RankedRoutes car_tracker(const DataChunk& chunk, const RoadGraph& graph,
                         const WeatherReport& weather,
                         const std::optional<SeedArea>& seed = {},
                         const CarConfig& cfg = {});

// ------------------------------------------------------------------ walking

// Stride times found by band-passing the gait band and counting settled
// upward zero crossings per axis (the strongest axis wins).
struct StepConfig {
    double band_lo_hz = 1.0;
    double band_hi_hz = 3.0;
    double hysteresis_frac = 0.3; // of the band-passed envelope
    double min_amp_ms2 = 0.3;
};

std::vector<std::size_t> detect_steps(const DataChunk& chunk, const StepConfig& cfg = {});

struct WalkConfig {
    TurnConfig turns;
    SearchConfig search; // step gating is forced on
    StepConfig steps;
};

// Same machinery as the car tracker with stride-count length gates:
// between consecutive turns the leg length must sit inside
// [step_min_m, step_max_m] * steps.
RankedRoutes walking_tracker(const DataChunk& chunk, const RoadGraph& graph,
                             const WeatherReport& weather,
                             const std::optional<SeedArea>& seed = {},
                             const WalkConfig& cfg = {});

// Geometry of a ranked path for reporting.
std::vector<std::pair<double, double>> path_lat_lon(const RoadGraph& graph,
                                                    const CandidatePath& path);
std::vector<std::int64_t> path_node_ids(const RoadGraph& graph, const CandidatePath& path);

} // namespace pintrack
