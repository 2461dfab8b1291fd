#pragma once

#include "pintrack/classify.hpp"
#include "pintrack/estimators/plane.hpp"
#include "pintrack/estimators/trackers.hpp"
#include "pintrack/estimators/train.hpp"
#include "pintrack/preprocess.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pintrack {

// Every tunable the toolkit exposes, addressable as dotted key=value lines.
// Files round-trip losslessly; unknown keys are rejected.
struct RunConfig {
    std::string method = "tailored"; // or "ml"
    std::string model_path;          // required when method == ml
    std::string aux_root;
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    double seed_half_side_m = 150.0;

    PartitionConfig partition;
    TailoredConfig tailored;   // owns the FeatureConfig used everywhere
    CarConfig car;             // turn scan + route search for driving
    WalkConfig walk;           // turn scan + route search + strides
    PhaseConfig phase;
    PlaneConfig plane;
    TrainStopConfig train_stops;
    TrainConfig train;

    // synthetic trace noise, exposed so experiments can sweep it
    double noise_heading_sigma_deg = 3.0;
    double noise_pressure_sigma_hpa = 0.12;
    double noise_accel_sigma_ms2 = 0.5;
};

RunConfig load_config(std::istream& in);
RunConfig load_config_file(const std::string& path);
void save_config(const RunConfig& cfg, std::ostream& out);
void save_config_file(const RunConfig& cfg, const std::string& path);

// Applies one key=value assignment; unknown key or bad value -> ConfigError.
void config_set(RunConfig& cfg, const std::string& key, const std::string& value);

// Propagates the shared turn/search knobs into the walking tracker config.
// load_config calls this; call it again after ad-hoc config_set edits.
void finalize_config(RunConfig& cfg);

} // namespace pintrack
