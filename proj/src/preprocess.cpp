#include "pintrack/preprocess.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/kernels.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace pintrack {

LastWifi find_last_wifi_ip(const SensorTrace& trace) {
    for (std::size_t i = trace.samples.size(); i-- > 0;) {
        const auto& s = trace.samples[i];
        if (s.ns == NetworkStatus::wifi && s.ip) return LastWifi{i, *s.ip};
    }
    raise(errc::never_on_wifi, "trace has no WiFi sample with an address");
}

std::vector<PartitionEvent> detect_partition_events(const SensorTrace& trace,
                                                    const PartitionConfig& cfg) {
    const auto chunk = whole_trace_chunk(trace);
    const auto mags = chunk_accel_magnitude(chunk);
    std::vector<PartitionEvent> events;
    std::size_t cluster_start = 0, cluster_count = 0;
    double cluster_peak = 0.0, last_spike_t = 0.0;
    auto flush = [&]() {
        if (cluster_count >= static_cast<std::size_t>(cfg.min_samples))
            events.push_back(PartitionEvent{cluster_start, cluster_peak});
        cluster_count = 0;
        cluster_peak = 0.0;
    };
    for (std::size_t i = 0; i < mags.size(); ++i) {
        if (mags[i] <= cfg.threshold_ms2) continue;
        const double t = trace.samples[i].t;
        if (cluster_count > 0 && t - last_spike_t > cfg.window_s) flush();
        if (cluster_count == 0) cluster_start = i;
        ++cluster_count;
        cluster_peak = std::max(cluster_peak, mags[i]);
        last_spike_t = t;
    }
    flush();
    return events;
}

std::vector<DataChunk> partition_stream(const SensorTrace& trace,
                                        const PartitionConfig& cfg) {
    if (trace.samples.empty()) raise(errc::empty_trace, "cannot partition empty trace");
    const auto events = detect_partition_events(trace, cfg);
    const std::size_t n = trace.samples.size();

    std::vector<std::size_t> boundaries;
    for (const auto& e : events)
        if (e.index > 0 && e.index < n) boundaries.push_back(e.index);

    // enforce the minimum chunk duration: a too-short chunk is absorbed into
    // the chunk that follows it (the last one falls back into its predecessor)
    std::vector<std::size_t> kept;
    std::size_t cur = 0;
    auto span_s = [&](std::size_t a, std::size_t b) {
        return trace.samples[b - 1].t - trace.samples[a].t;
    };
    for (const auto b : boundaries) {
        if (b <= cur) continue;
        if (span_s(cur, b) >= cfg.min_chunk_s) {
            kept.push_back(b);
            cur = b;
        }
    }
    if (!kept.empty() && span_s(cur, n) < cfg.min_chunk_s) {
        cur = kept.back();
        kept.pop_back();
    }

    std::vector<DataChunk> chunks;
    std::size_t start = 0;
    for (const auto b : kept) {
        chunks.push_back(DataChunk{&trace, start, b, std::nullopt});
        start = b;
    }
    chunks.push_back(DataChunk{&trace, start, n, std::nullopt});
    return chunks;
}

std::vector<DataChunk> merge_chunks(const std::vector<DataChunk>& chunks,
                                    const std::vector<ActivityLabel>& labels) {
    if (chunks.size() != labels.size())
        raise(errc::length_mismatch,
              fmt::format("{} chunks but {} labels", chunks.size(), labels.size()));
    if (chunks.empty()) return {};
    for (std::size_t i = 1; i < chunks.size(); ++i)
        if (chunks[i].trace != chunks[0].trace || chunks[i].begin != chunks[i - 1].end)
            raise(errc::invariant_violation, "chunks must tile one trace in order");

    std::vector<DataChunk> out;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (!out.empty() && out.back().label == labels[i]) {
            out.back().end = chunks[i].end;
        } else {
            DataChunk c = chunks[i];
            c.label = labels[i];
            out.push_back(c);
        }
    }
    return out;
}

} // namespace pintrack
