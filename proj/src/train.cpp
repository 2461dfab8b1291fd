#include "pintrack/estimators/train.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/geo.hpp"
#include "pintrack/signals.hpp"

#include <algorithm>
#include <cmath>

namespace pintrack {

using namespace geo;

using namespace signals;

namespace {

struct Run {
    std::size_t begin, end; // half-open, stationary samples
};

} // namespace

TravelIntervals extract_travel_intervals(const DataChunk& chunk, const TrainStopConfig& cfg) {
    const std::vector<double> t = chunk_times(chunk);
    const std::size_t n = t.size();
    const double rate = chunk.rate_hz();

    std::vector<double> ldev = linear_deviation(chunk);
    const std::size_t roll_n = static_cast<std::size_t>(
        std::max(1.0, std::round(cfg.roll_window_s * rate)));
    std::vector<double> activity = moving_mean(ldev, roll_n);

    // moving mask, with short vibration lulls bridged
    std::vector<char> moving(n, 0);
    for (std::size_t i = 0; i < n; ++i) moving[i] = activity[i] > cfg.move_thresh_ms2;
    std::size_t i = 0;
    std::size_t last_move_end = 0;
    bool seen_move = false;
    while (i < n) {
        if (moving[i]) {
            if (seen_move && t[i] - t[last_move_end - 1] < cfg.merge_gap_s)
                for (std::size_t j = last_move_end; j < i; ++j) moving[j] = 1;
            std::size_t j = i;
            while (j < n && moving[j]) ++j;
            last_move_end = j;
            seen_move = true;
            i = j;
        } else {
            ++i;
        }
    }

    // stationary runs long enough to be station dwells
    std::vector<Run> stops;
    i = 0;
    while (i < n) {
        if (moving[i]) { ++i; continue; }
        std::size_t j = i;
        while (j < n && !moving[j]) ++j;
        if (t[j - 1] - t[i] >= cfg.min_dwell_s) stops.push_back({i, j});
        i = j;
    }
    if (stops.size() < 2)
        raise(errc::no_stops_detected,
                      "need a boarding dwell and at least one stop, found " +
                          std::to_string(stops.size()));

    TravelIntervals out;
    for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
        const double depart_t = t[stops[k].end - 1];
        const double arrive_t = t[stops[k + 1].begin];
        out.minutes.push_back((arrive_t - depart_t) / 60.0);
        out.stop_t_s.push_back(arrive_t);
    }

    out.departure_epoch_s = chunk.trace->anchor_epoch_s +
                            static_cast<std::int64_t>(std::llround(t[stops[0].end - 1]));

    // settled heading while pulling out of the boarding station
    const std::size_t h_begin = stops[0].end;
    std::size_t h_end = h_begin;
    while (h_end < n && t[h_end] - t[h_begin] <= cfg.heading_span_s) ++h_end;
    std::vector<double> hs;
    hs.reserve(h_end - h_begin);
    auto samples = chunk.samples();
    for (std::size_t k2 = h_begin; k2 < h_end; ++k2) hs.push_back(samples[k2].heading);
    out.initial_heading_deg = circular_mean_deg(hs);
    return out;
}

std::vector<TrainCandidate> train_tracker(const TravelIntervals& obs,
                                          const TrainTimetable& timetable,
                                          const TrainHeadings& headings,
                                          const TrainConfig& cfg) {
    if (obs.minutes.empty())
        raise(errc::no_stops_detected, "no travel intervals observed");

    std::vector<TrainCandidate> out;
    for (const TrainRun& run : timetable.runs) {
        const double dt_depart = std::abs(static_cast<double>(
                                     obs.departure_epoch_s - run.departure_epoch_s())) / 60.0;
        if (dt_depart > cfg.departure_window_min) continue;

        const std::vector<double> t_run = run.travel_intervals_min();
        if (t_run.size() < obs.minutes.size()) continue;

        double d = 0.0;
        for (std::size_t i = 0; i < obs.minutes.size(); ++i)
            d += std::abs(obs.minutes[i] - t_run[i]);
        if (!(d < cfg.d_per_interval_min * static_cast<double>(obs.minutes.size())))
            continue;

        auto it = headings.find(run.origin());
        if (it == headings.end()) continue;
        bool heading_ok = false;
        for (double h : it->second)
            if (std::abs(wrap180(obs.initial_heading_deg - h)) <= cfg.heading_tol_deg) {
                heading_ok = true;
                break;
            }
        if (!heading_ok) continue;

        TrainCandidate c;
        c.train_id = run.train_id;
        for (std::size_t i = 0; i <= obs.minutes.size(); ++i)
            c.stations.push_back(run.stops[i].station);
        c.d_minutes = d;
        out.push_back(std::move(c));
    }
    if (out.empty()) raise(errc::no_route, "no timetable run fits the ride");
    std::sort(out.begin(), out.end(), [](const TrainCandidate& a, const TrainCandidate& b) {
        if (a.d_minutes != b.d_minutes) return a.d_minutes < b.d_minutes;
        return a.train_id < b.train_id;
    });
    return out;
}

} // namespace pintrack
