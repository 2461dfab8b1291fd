#pragma once

#include "pintrack/trace.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace pintrack {

struct LastWifi {
    std::size_t index = 0;
    std::string ip;
};

// Most recent sample with WiFi connectivity and an address; NeverOnWiFi when
// no such sample exists.
LastWifi find_last_wifi_ip(const SensorTrace& trace);

struct PartitionConfig {
    double threshold_ms2 = 25.0; // accel magnitude a transition spike exceeds
    double window_s = 2.0;       // spikes this close belong to one event
    int min_samples = 2;         // spikes needed to call it a transition
    double min_chunk_s = 30.0;   // shorter chunks merge into the next one
};

struct PartitionEvent {
    std::size_t index = 0;       // first spike sample; starts the next chunk
    double peak_accel_mag = 0.0;
};

std::vector<PartitionEvent> detect_partition_events(const SensorTrace& trace,
                                                    const PartitionConfig& cfg = {});

// Splits the trace at activity-transition spikes. Chunks tile the trace
// exactly; spike samples open the chunk that follows them.
std::vector<DataChunk> partition_stream(const SensorTrace& trace,
                                        const PartitionConfig& cfg = {});

// Labels each chunk and coalesces adjacent chunks that carry the same label.
// chunks must tile a single trace in order; labels.size() must match.
std::vector<DataChunk> merge_chunks(const std::vector<DataChunk>& chunks,
                                    const std::vector<ActivityLabel>& labels);

} // namespace pintrack
