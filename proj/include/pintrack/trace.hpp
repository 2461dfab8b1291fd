#pragma once

#include "pintrack/activity.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pintrack {

enum class NetworkStatus { wifi, cellular, offline };

const char* to_string(NetworkStatus ns);
NetworkStatus network_status_from_string(const std::string& s);

// One sensor reading. Time is seconds relative to the trace start; the
// absolute wall clock lives once on the trace as a UTC anchor.
struct SensorSample {
    double t = 0.0;                    // seconds since trace start, >= 0
    std::array<double, 3> accel{};     // m/s^2, each component in [-160, 160]
    double heading = 0.0;              // degrees clockwise from north, [0, 360)
    double pressure = 1013.25;         // hPa, (300, 1100)
    int tz_minutes = 0;                // device UTC offset, minutes
    std::optional<std::string> ip;     // absent when the device has no address
    NetworkStatus ns = NetworkStatus::offline;

    bool operator==(const SensorSample&) const = default;
};

struct SensorTrace {
    std::vector<SensorSample> samples;
    double nominal_rate_hz = 5.0;
    std::int64_t anchor_epoch_s = 0;   // UTC instant of t == 0

    bool operator==(const SensorTrace&) const = default;

    double duration_s() const {
        return samples.empty() ? 0.0 : samples.back().t - samples.front().t;
    }
    std::int64_t abs_time_s(double t) const {
        return anchor_epoch_s + static_cast<std::int64_t>(t);
    }
};

// Contiguous slice of a trace. The trace must outlive its chunks.
struct DataChunk {
    const SensorTrace* trace = nullptr;
    std::size_t begin = 0; // first sample index
    std::size_t end = 0;   // one past the last sample index
    std::optional<ActivityLabel> label;

    std::span<const SensorSample> samples() const {
        return {trace->samples.data() + begin, end - begin};
    }
    std::size_t size() const { return end - begin; }
    double start_t() const { return trace->samples[begin].t; }
    double end_t() const { return trace->samples[end - 1].t; }
    double duration_s() const { return end_t() - start_t(); }
    double rate_hz() const { return trace->nominal_rate_hz; }
};

// Column extraction for the kernel layer.
std::vector<double> chunk_times(const DataChunk& c);
std::vector<double> chunk_headings(const DataChunk& c);
std::vector<double> chunk_pressures(const DataChunk& c);
std::vector<double> chunk_axis(const DataChunk& c, int axis);
std::vector<double> chunk_accel_magnitude(const DataChunk& c);

DataChunk whole_trace_chunk(const SensorTrace& t);

// Throws on any violated invariant (strictly increasing t, field ranges,
// nonempty, median spacing within 20% of 1/nominal_rate).
void validate(const SensorTrace& trace);

// Readers reject malformed or out-of-range rows with their line number
// rather than clamping or skipping. Format is detected by extension in the
// path overloads (.jsonl vs anything else = CSV).
SensorTrace ingest_trace_csv(std::istream& in);
SensorTrace ingest_trace_jsonl(std::istream& in);
SensorTrace ingest_trace_file(const std::string& path);

void write_trace_csv(const SensorTrace& t, std::ostream& out);
void write_trace_jsonl(const SensorTrace& t, std::ostream& out);
void write_trace_file(const SensorTrace& t, const std::string& path);

// Keeps the nearest sample per target tick (k / target_rate_hz over the trace
// span); never interpolates or invents values. target above the nominal rate
// is an error.
SensorTrace resample(const SensorTrace& t, double target_rate_hz);

} // namespace pintrack
