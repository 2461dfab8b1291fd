#include "pintrack/classify.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/kernels.hpp"
#include "pintrack/signals.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace pintrack {

using namespace signals;

namespace {

// Longest run over which the smoothed pressure moves one way, allowing
// reversals smaller than eps. Returns {seconds, total change in hPa}.
std::pair<double, double> longest_monotone_run(const std::vector<double>& t,
                                               const std::vector<double>& p,
                                               double eps) {
    const std::size_t n = p.size();
    double best_s = 0.0, best_change = 0.0;
    for (int dir : {+1, -1}) {
        std::size_t start = 0;
        double extreme = p[0];
        std::size_t extreme_i = 0;
        for (std::size_t i = 1; i < n; ++i) {
            double adv = dir * (p[i] - extreme);
            if (adv >= 0.0) {
                extreme = p[i];
                extreme_i = i;
            } else if (-adv > eps) {
                double span = t[extreme_i] - t[start];
                if (span > best_s) {
                    best_s = span;
                    best_change = std::abs(p[extreme_i] - p[start]);
                }
                start = i;
                extreme = p[i];
                extreme_i = i;
            }
        }
        double span = t[extreme_i] - t[start];
        if (span > best_s) {
            best_s = span;
            best_change = std::abs(p[extreme_i] - p[start]);
        }
    }
    return {best_s, best_change};
}

struct Episode {
    double start_s, end_s;
};

// Contiguous spans where the rolling level exceeds thresh, merged across
// gaps shorter than gap_s.
std::vector<Episode> level_episodes(const std::vector<double>& t,
                                    const std::vector<double>& level,
                                    double thresh, double gap_s) {
    std::vector<Episode> out;
    const std::size_t n = level.size();
    std::size_t i = 0;
    while (i < n) {
        if (level[i] <= thresh) { ++i; continue; }
        std::size_t j = i;
        while (j + 1 < n && level[j + 1] > thresh) ++j;
        if (!out.empty() && t[i] - out.back().end_s < gap_s)
            out.back().end_s = t[j];
        else
            out.push_back({t[i], t[j]});
        i = j + 1;
    }
    return out;
}

bool tz_changes(const DataChunk& chunk) {
    auto s = chunk.samples();
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i].tz_minutes != s[0].tz_minutes) return true;
    return false;
}

} // namespace

ActivityLabel classify_tailored(const DataChunk& chunk, const TailoredConfig& cfg) {
    FeatureVector f = extract_features(chunk, cfg.features);

    const std::vector<double> t = chunk_times(chunk);
    const double rate = chunk.rate_hz();
    const std::size_t roll_n = static_cast<std::size_t>(
        std::max(1.0, std::round(cfg.roll_window_s * rate)));

    // Plane: large pressure swing traversed in one sustained sweep, or the
    // timezone flips mid-chunk.
    const double press_range = f[18];
    if (press_range > cfg.plane_pressure_range_hpa) {
        std::vector<double> ps = moving_mean(chunk_pressures(chunk), roll_n);
        auto [run_s, run_change] = longest_monotone_run(t, ps, cfg.plane_monotone_eps_hpa);
        if (run_s >= cfg.plane_monotone_min_s &&
            run_change >= cfg.plane_monotone_min_change_hpa)
            return ActivityLabel::plane;
    }
    if (tz_changes(chunk)) return ActivityLabel::plane;

    std::vector<double> ldev = linear_deviation(chunk);
    std::vector<double> roll = moving_mean(ldev, roll_n);

    // Train: heading pinned to the track while the specific force shows a
    // few bounded speed-change episodes separated by steady running.
    std::vector<double> u = unwrap_degrees(chunk_headings(chunk));
    double umin = 0.0, umax = 0.0;
    kernels::minmax(u.data(), u.size(), &umin, &umax);
    if (umax - umin <= cfg.train_heading_span_deg) {
        std::vector<Episode> eps = level_episodes(t, roll, cfg.train_episode_thresh_ms2,
                                                  cfg.train_episode_gap_s);
        int bounded = 0;
        for (const Episode& e : eps) {
            double len = e.end_s - e.start_s;
            if (len >= cfg.train_episode_min_s && len <= cfg.train_episode_max_s)
                ++bounded;
        }
        if (bounded >= cfg.train_min_episodes) return ActivityLabel::train;
    }

    // Walking: some axis oscillates at gait frequency with real amplitude.
    if (rate >= 2.0 * cfg.walk_band_lo_hz) {
        for (int axis = 0; axis < 3; ++axis) {
            double pf = f[static_cast<std::size_t>(axis) * 5 + 3];
            double sd = f[static_cast<std::size_t>(axis) * 5 + 2];
            if (pf < cfg.walk_band_lo_hz || pf > cfg.walk_band_hi_hz) continue;
            if (sd < cfg.walk_min_axis_std) continue;
            Spectrum s = power_spectrum(chunk_axis(chunk, axis), rate);
            if (band_fraction(s, cfg.walk_band_lo_hz, cfg.walk_band_hi_hz) >=
                cfg.walk_band_fraction)
                return ActivityLabel::walking;
        }
    }

    // Driving: settled heading excursions plus engine/road activity.
    double roll_max = 0.0, roll_min = 0.0;
    kernels::minmax(roll.data(), roll.size(), &roll_min, &roll_max);
    if (f[19] >= cfg.drive_min_turns && roll_max > cfg.drive_min_activity_ms2)
        return ActivityLabel::driving;

    return ActivityLabel::unrecognized;
}

std::array<double, FeatureVector::kSize> ClassifierModel::zscore(const FeatureVector& f) const {
    std::array<double, FeatureVector::kSize> z{};
    for (std::size_t i = 0; i < FeatureVector::kSize; ++i)
        z[i] = (f[i] - feat_mean[i]) / feat_std[i];
    return z;
}

ClassifierModel train_binary_classifiers(const std::vector<FeatureVector>& features,
                                         const std::vector<ActivityLabel>& labels,
                                         std::uint64_t seed,
                                         const TrainingOptions& opt) {
    if (features.empty()) raise(errc::empty_dataset, "no training examples");
    if (features.size() != labels.size())
        raise(errc::length_mismatch, "feature/label counts differ");

    for (ActivityLabel c : kModelOrder) {
        std::size_t count = 0;
        for (ActivityLabel l : labels)
            if (l == c) ++count;
        if (count < 2)
            raise(errc::insufficient_data,
                          std::string("need at least 2 examples of ") + to_string(c));
    }
    bool all_same = std::all_of(features.begin(), features.end(),
                                [&](const FeatureVector& f) { return f == features[0]; });
    if (all_same)
        raise(errc::degenerate_class, "all feature vectors identical");

    const std::size_t n = features.size();
    constexpr std::size_t D = FeatureVector::kSize;

    ClassifierModel m;
    m.seed = seed;
    for (std::size_t d = 0; d < D; ++d) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = features[i][d];
        double mean = 0.0, var = 0.0;
        kernels::mean_var(col.data(), col.size(), &mean, &var);
        m.feat_mean[d] = mean;
        m.feat_std[d] = var > 0.0 ? std::sqrt(var) : 1.0;
    }

    std::vector<std::array<double, D>> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = m.zscore(features[i]);

    for (std::size_t c = 0; c < kModelOrder.size(); ++c) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i)
            y[i] = labels[i] == kModelOrder[c] ? 1.0 : -1.0;

        LinearModel& lm = m.models[c];
        const double lambda = opt.lambda;
        for (int it = 0; it < opt.iterations; ++it) {
            std::array<double, D> gw{};
            double gb = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double margin = lm.b;
                for (std::size_t d = 0; d < D; ++d) margin += lm.w[d] * z[i][d];
                if (y[i] * margin < 1.0) {
                    for (std::size_t d = 0; d < D; ++d) gw[d] -= y[i] * z[i][d];
                    gb -= y[i];
                }
            }
            const double inv_n = 1.0 / static_cast<double>(n);
            const double eta = 1.0 / (lambda * static_cast<double>(it + 10));
            for (std::size_t d = 0; d < D; ++d)
                lm.w[d] -= eta * (lambda * lm.w[d] + gw[d] * inv_n);
            lm.b -= eta * gb * inv_n;
        }
    }
    return m;
}

ActivityLabel decide_from_margins(const std::array<double, 4>& margins) {
    int positive = -1;
    for (std::size_t c = 0; c < margins.size(); ++c) {
        if (margins[c] > 0.0) {
            if (positive >= 0) return ActivityLabel::unrecognized;
            positive = static_cast<int>(c);
        }
    }
    if (positive < 0) return ActivityLabel::unrecognized;
    return kModelOrder[static_cast<std::size_t>(positive)];
}

ActivityLabel classify_ml(const FeatureVector& f, const ClassifierModel& m) {
    auto z = m.zscore(f);
    std::array<double, 4> margins{};
    for (std::size_t c = 0; c < m.models.size(); ++c) {
        double s = m.models[c].b;
        for (std::size_t d = 0; d < FeatureVector::kSize; ++d)
            s += m.models[c].w[d] * z[d];
        margins[c] = s;
    }
    return decide_from_margins(margins);
}

void save_model_json(const ClassifierModel& m, std::ostream& out) {
    nlohmann::json j;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["feature_names"] = kFeatureNames;
    j["mean"] = m.feat_mean;
    j["std"] = m.feat_std;
    nlohmann::json classes = nlohmann::json::array();
    for (std::size_t c = 0; c < m.models.size(); ++c) {
        nlohmann::json e;
        e["label"] = to_string(kModelOrder[c]);
        e["w"] = m.models[c].w;
        e["b"] = m.models[c].b;
        classes.push_back(std::move(e));
    }
    j["classes"] = std::move(classes);
    out << j.dump(2) << '\n';
}

ClassifierModel load_model_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("model json: ") + e.what());
    }
    try {
        ClassifierModel m;
        m.version = j.at("version").get<int>();
        if (m.version != 1)
            raise(errc::parse_error,
                          "unsupported model version " + std::to_string(m.version));
        m.seed = j.at("seed").get<std::uint64_t>();
        auto mean = j.at("mean").get<std::vector<double>>();
        auto sd = j.at("std").get<std::vector<double>>();
        if (mean.size() != FeatureVector::kSize || sd.size() != FeatureVector::kSize)
            raise(errc::parse_error, "model stats have wrong arity");
        std::copy(mean.begin(), mean.end(), m.feat_mean.begin());
        std::copy(sd.begin(), sd.end(), m.feat_std.begin());
        const auto& classes = j.at("classes");
        if (classes.size() != m.models.size())
            raise(errc::parse_error, "model must carry 4 classifiers");
        for (std::size_t c = 0; c < m.models.size(); ++c) {
            const auto& e = classes.at(c);
            if (activity_from_string(e.at("label").get<std::string>()) != kModelOrder[c])
                raise(errc::parse_error, "model classes out of order");
            auto w = e.at("w").get<std::vector<double>>();
            if (w.size() != FeatureVector::kSize)
                raise(errc::parse_error, "weight vector has wrong arity");
            std::copy(w.begin(), w.end(), m.models[c].w.begin());
            m.models[c].b = e.at("b").get<double>();
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("model json: ") + e.what());
    }
}

void save_model_file(const ClassifierModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(errc::parse_error, "cannot open " + path + " for writing");
    save_model_json(m, out);
}

ClassifierModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::parse_error, "cannot open " + path);
    return load_model_json(in);
}

} // namespace pintrack
