#pragma once

#include "pintrack/trace.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pintrack {

// 21 features per chunk, order frozen (model file version 1):
//   per accel axis (x, y, z): mean, median, stddev, principal freq, spectral energy
//   pressure: mean, median, stddev, range
//   heading: settled turn count (excursions >= 70 deg), max rate over 1 s windows
struct FeatureVector {
    static constexpr std::size_t kSize = 21;
    std::array<double, kSize> v{};

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    bool operator==(const FeatureVector&) const = default;
};

extern const std::array<const char*, FeatureVector::kSize> kFeatureNames;

struct FeatureConfig {
    double min_chunk_s = 30.0;    // shorter chunks are an error
    double min_rate_hz = 1.0;     // below this the spectral features degrade
    double turn_min_deg = 70.0;   // excursion size that counts as a turn
    double plateau_tol_deg = 15.0;
    double plateau_min_s = 3.0;
    std::size_t plateau_min_n = 3;
};

FeatureVector extract_features(const DataChunk& chunk, const FeatureConfig& cfg = {});

// Rule cascade over the published per-activity signatures; first match wins.
// Checked in the order plane, train, walking, driving; a chunk matching
// nothing (e.g. no motion at all) is unrecognized.
struct TailoredConfig {
    double plane_pressure_range_hpa = 30.0;
    double plane_monotone_min_s = 60.0;
    double plane_monotone_eps_hpa = 0.05;   // smoothed reversals below this keep a run alive
    double plane_monotone_min_change_hpa = 10.0;
    double plane_smooth_s = 10.0;

    double train_heading_span_deg = 30.0;
    double train_episode_thresh_ms2 = 1.45; // rolling specific-force level of a speed change
    double train_episode_min_s = 3.0;
    double train_episode_max_s = 90.0;
    int train_min_episodes = 2;
    double train_episode_gap_s = 5.0;

    double walk_band_lo_hz = 1.0, walk_band_hi_hz = 3.0;
    double walk_band_fraction = 0.4;
    double walk_min_axis_std = 0.7;

    int drive_min_turns = 1;
    double drive_min_activity_ms2 = 0.9;

    double roll_window_s = 5.0;
    FeatureConfig features;
};

ActivityLabel classify_tailored(const DataChunk& chunk, const TailoredConfig& cfg = {});

// One-vs-rest maximum-margin linear separators over z-scored features,
// trained with deterministic batch subgradient descent on the hinge loss.
struct LinearModel {
    std::array<double, FeatureVector::kSize> w{};
    double b = 0.0;
};

struct ClassifierModel {
    int version = 1;
    std::uint64_t seed = 0;
    std::array<double, FeatureVector::kSize> feat_mean{};
    std::array<double, FeatureVector::kSize> feat_std{};
    // order: driving, plane, train, walking
    std::array<LinearModel, 4> models{};

    std::array<double, FeatureVector::kSize> zscore(const FeatureVector& f) const;
};

inline constexpr std::array<ActivityLabel, 4> kModelOrder{
    ActivityLabel::driving, ActivityLabel::plane, ActivityLabel::train,
    ActivityLabel::walking};

struct TrainingOptions {
    double lambda = 1e-3;
    int iterations = 4000;
};

ClassifierModel train_binary_classifiers(const std::vector<FeatureVector>& features,
                                         const std::vector<ActivityLabel>& labels,
                                         std::uint64_t seed,
                                         const TrainingOptions& opt = {});

// Decision step: exactly one positive margin picks its label, anything else
// (zero or several) is unrecognized.
ActivityLabel decide_from_margins(const std::array<double, 4>& margins);
ActivityLabel classify_ml(const FeatureVector& f, const ClassifierModel& m);

void save_model_json(const ClassifierModel& m, std::ostream& out);
ClassifierModel load_model_json(std::istream& in);
void save_model_file(const ClassifierModel& m, const std::string& path);
ClassifierModel load_model_file(const std::string& path);

} // namespace pintrack
