#pragma once

#include "pintrack/trace.hpp"

#include <cstddef>
#include <vector>

namespace pintrack {

// A settled heading excursion: the user held one heading, swung through
// delta degrees, and settled on a new one. index is the first sample of
// the new plateau; the pressure is averaged on a window centered at the
// swing itself, so steady travel across sloped ground biases the turn-point
// elevation equally from both sides and cancels.
struct TurnEvent {
    std::size_t index = 0;
    double t_s = 0.0;
    double delta_deg = 0.0;          // signed, positive clockwise
    double pressure_hpa = 0.0;
};

struct TurnConfig {
    double window_lo_deg = 70.0;     // excursions inside [lo, hi] count as turns
    double window_hi_deg = 110.0;
    double plateau_tol_deg = 15.0;
    double plateau_min_s = 3.0;
    std::size_t plateau_min_n = 3;
    double settle_pressure_s = 5.0;  // averaging span at the settle plateau
};

// Full scan of a chunk's heading stream. Plateaus of the unwrapped heading
// segment the stream; consecutive plateau means give the excursion sizes.
struct TurnScan {
    std::vector<TurnEvent> turns;    // excursions inside the turn window
    std::vector<double> all_deltas;  // every inter-plateau excursion, signed
    bool has_plateaus = false;
    double initial_heading_deg = 0.0; // first plateau mean, normalized
    double final_heading_deg = 0.0;   // last plateau mean, normalized
    double initial_pressure_hpa = 0.0;
    double final_pressure_hpa = 0.0;
};

TurnScan scan_turns(const DataChunk& chunk, const TurnConfig& cfg = {});

std::vector<TurnEvent> detect_turns(const DataChunk& chunk, const TurnConfig& cfg = {});

} // namespace pintrack
