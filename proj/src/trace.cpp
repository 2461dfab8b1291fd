#include "pintrack/trace.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/kernels.hpp"
#include "pintrack/utc.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pintrack {

using nlohmann::json;

ActivityLabel activity_from_string(const std::string& s) {
    if (s == "driving") return ActivityLabel::driving;
    if (s == "plane") return ActivityLabel::plane;
    if (s == "train") return ActivityLabel::train;
    if (s == "walking") return ActivityLabel::walking;
    if (s == "unrecognized") return ActivityLabel::unrecognized;
    raise(errc::parse_error, "unknown activity label: " + s);
}

const char* to_string(NetworkStatus ns) {
    switch (ns) {
        case NetworkStatus::wifi: return "wifi";
        case NetworkStatus::cellular: return "cell";
        case NetworkStatus::offline: return "off";
    }
    return "off";
}

NetworkStatus network_status_from_string(const std::string& s) {
    if (s == "wifi") return NetworkStatus::wifi;
    if (s == "cell") return NetworkStatus::cellular;
    if (s == "off") return NetworkStatus::offline;
    raise(errc::parse_error, "unknown network status: " + s);
}

namespace {

constexpr const char* kHeader = "t,ax,ay,az,heading,pressure,tz,ip,ns";

double parse_double(const std::string& s, int line, const char* field) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        raise(errc::parse_error,
              fmt::format("line {}: field '{}' is not a number: '{}'", line, field, s));
    }
}

int parse_int(const std::string& s, int line, const char* field) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        raise(errc::parse_error,
              fmt::format("line {}: field '{}' is not an integer: '{}'", line, field, s));
    }
}

void check_sample_ranges(const SensorSample& s, int line) {
    auto bad = [&](const char* field, const std::string& detail) {
        raise(errc::invariant_violation,
              fmt::format("line {}: {} {}", line, field, detail));
    };
    if (!(s.t >= 0.0) || !std::isfinite(s.t)) bad("t", "must be finite and >= 0");
    for (double a : s.accel)
        if (!std::isfinite(a) || std::abs(a) > 160.0)
            bad("accel", "component out of [-160, 160]");
    if (!std::isfinite(s.heading) || s.heading < 0.0 || s.heading >= 360.0)
        bad("heading", fmt::format("out of [0, 360): {}", s.heading));
    if (!std::isfinite(s.pressure) || s.pressure <= 300.0 || s.pressure >= 1100.0)
        bad("pressure", fmt::format("out of (300, 1100): {}", s.pressure));
}

void check_trace_level(const SensorTrace& t) {
    if (t.samples.empty()) raise(errc::empty_trace, "trace has no samples");
    if (!(t.nominal_rate_hz > 0.0))
        raise(errc::invariant_violation, "nominal_rate must be positive");
    for (std::size_t i = 1; i < t.samples.size(); ++i)
        if (!(t.samples[i].t > t.samples[i - 1].t))
            raise(errc::invariant_violation,
                  fmt::format("sample times not strictly increasing at index {}", i));
    if (t.samples.size() >= 2) {
        std::vector<double> gaps;
        gaps.reserve(t.samples.size() - 1);
        for (std::size_t i = 1; i < t.samples.size(); ++i)
            gaps.push_back(t.samples[i].t - t.samples[i - 1].t);
        std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
        const double median = gaps[gaps.size() / 2];
        const double expected = 1.0 / t.nominal_rate_hz;
        if (std::abs(median - expected) > 0.2 * expected)
            raise(errc::invariant_violation,
                  fmt::format("median sample spacing {}s deviates more than 20% from "
                              "nominal {}s",
                              median, expected));
    }
}

// "# key=value key=value" header comment
void parse_header_comment(const std::string& line, int lineno, bool& have_anchor,
                          std::int64_t& anchor, double& rate) {
    std::istringstream ss(line.substr(1));
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos)
            raise(errc::parse_error,
                  fmt::format("line {}: malformed header token '{}'", lineno, tok));
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "anchor_utc") {
            anchor = utc::parse_rfc3339(val);
            have_anchor = true;
        } else if (key == "nominal_rate") {
            rate = parse_double(val, lineno, "nominal_rate");
        } else {
            raise(errc::parse_error,
                  fmt::format("line {}: unknown header key '{}'", lineno, key));
        }
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::vector<double> chunk_times(const DataChunk& c) {
    std::vector<double> v;
    v.reserve(c.size());
    for (const auto& s : c.samples()) v.push_back(s.t);
    return v;
}

std::vector<double> chunk_headings(const DataChunk& c) {
    std::vector<double> v;
    v.reserve(c.size());
    for (const auto& s : c.samples()) v.push_back(s.heading);
    return v;
}

std::vector<double> chunk_pressures(const DataChunk& c) {
    std::vector<double> v;
    v.reserve(c.size());
    for (const auto& s : c.samples()) v.push_back(s.pressure);
    return v;
}

std::vector<double> chunk_axis(const DataChunk& c, int axis) {
    std::vector<double> v;
    v.reserve(c.size());
    for (const auto& s : c.samples()) v.push_back(s.accel[axis]);
    return v;
}

std::vector<double> chunk_accel_magnitude(const DataChunk& c) {
    std::vector<double> out(c.size());
    std::vector<double> x = chunk_axis(c, 0), y = chunk_axis(c, 1), z = chunk_axis(c, 2);
    kernels::magnitude3(x.data(), y.data(), z.data(), out.data(), out.size());
    return out;
}

DataChunk whole_trace_chunk(const SensorTrace& t) {
    return DataChunk{&t, 0, t.samples.size(), std::nullopt};
}

void validate(const SensorTrace& trace) {
    check_trace_level(trace);
    int line = 0;
    for (const auto& s : trace.samples) check_sample_ranges(s, ++line);
}

SensorTrace ingest_trace_csv(std::istream& in) {
    SensorTrace trace;
    bool have_anchor = false;
    bool have_columns = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (have_columns)
                raise(errc::parse_error,
                      fmt::format("line {}: header comment after data", lineno));
            parse_header_comment(line, lineno, have_anchor, trace.anchor_epoch_s,
                                 trace.nominal_rate_hz);
            continue;
        }
        if (!have_columns) {
            if (line != kHeader)
                raise(errc::parse_error,
                      fmt::format("line {}: expected column header '{}'", lineno, kHeader));
            have_columns = true;
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 9)
            raise(errc::parse_error,
                  fmt::format("line {}: expected 9 fields, got {}", lineno, f.size()));
        SensorSample s;
        s.t = parse_double(f[0], lineno, "t");
        s.accel = {parse_double(f[1], lineno, "ax"), parse_double(f[2], lineno, "ay"),
                   parse_double(f[3], lineno, "az")};
        s.heading = parse_double(f[4], lineno, "heading");
        s.pressure = parse_double(f[5], lineno, "pressure");
        s.tz_minutes = parse_int(f[6], lineno, "tz");
        if (!f[7].empty()) s.ip = f[7];
        s.ns = network_status_from_string(f[8]);
        check_sample_ranges(s, lineno);
        if (!trace.samples.empty() && !(s.t > trace.samples.back().t))
            raise(errc::invariant_violation,
                  fmt::format("line {}: t not strictly increasing", lineno));
        trace.samples.push_back(std::move(s));
    }
    if (!have_anchor) raise(errc::parse_error, "missing '# anchor_utc=' header");
    check_trace_level(trace);
    return trace;
}

SensorTrace ingest_trace_jsonl(std::istream& in) {
    SensorTrace trace;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            raise(errc::parse_error, fmt::format("line {}: {}", lineno, e.what()));
        }
        if (!have_header) {
            if (!j.contains("anchor_utc"))
                raise(errc::parse_error,
                      fmt::format("line {}: first object must carry anchor_utc", lineno));
            trace.anchor_epoch_s = utc::parse_rfc3339(j.at("anchor_utc").get<std::string>());
            if (j.contains("nominal_rate"))
                trace.nominal_rate_hz = j.at("nominal_rate").get<double>();
            have_header = true;
            continue;
        }
        SensorSample s;
        try {
            s.t = j.at("t").get<double>();
            s.accel = {j.at("ax").get<double>(), j.at("ay").get<double>(),
                       j.at("az").get<double>()};
            s.heading = j.at("heading").get<double>();
            s.pressure = j.at("pressure").get<double>();
            s.tz_minutes = j.at("tz").get<int>();
            if (j.contains("ip") && !j.at("ip").is_null())
                s.ip = j.at("ip").get<std::string>();
            s.ns = network_status_from_string(j.at("ns").get<std::string>());
        } catch (const json::exception& e) {
            raise(errc::parse_error, fmt::format("line {}: {}", lineno, e.what()));
        }
        check_sample_ranges(s, lineno);
        if (!trace.samples.empty() && !(s.t > trace.samples.back().t))
            raise(errc::invariant_violation,
                  fmt::format("line {}: t not strictly increasing", lineno));
        trace.samples.push_back(std::move(s));
    }
    if (!have_header) raise(errc::parse_error, "empty jsonl input");
    check_trace_level(trace);
    return trace;
}

SensorTrace ingest_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::parse_error, "cannot open trace file: " + path);
    if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl")
        return ingest_trace_jsonl(in);
    return ingest_trace_csv(in);
}

void write_trace_csv(const SensorTrace& t, std::ostream& out) {
    out << fmt::format("# anchor_utc={} nominal_rate={}\n",
                       utc::format_rfc3339(t.anchor_epoch_s), t.nominal_rate_hz);
    out << kHeader << '\n';
    for (const auto& s : t.samples)
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", s.t, s.accel[0], s.accel[1],
                           s.accel[2], s.heading, s.pressure, s.tz_minutes,
                           s.ip ? *s.ip : "", to_string(s.ns));
}

void write_trace_jsonl(const SensorTrace& t, std::ostream& out) {
    json header{{"anchor_utc", utc::format_rfc3339(t.anchor_epoch_s)},
                {"nominal_rate", t.nominal_rate_hz}};
    out << header.dump() << '\n';
    for (const auto& s : t.samples) {
        json j{{"t", s.t},       {"ax", s.accel[0]},    {"ay", s.accel[1]},
               {"az", s.accel[2]}, {"heading", s.heading}, {"pressure", s.pressure},
               {"tz", s.tz_minutes}, {"ns", to_string(s.ns)}};
        if (s.ip) j["ip"] = *s.ip;
        out << j.dump() << '\n';
    }
}

void write_trace_file(const SensorTrace& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(errc::parse_error, "cannot open for write: " + path);
    if (path.size() > 6 && path.substr(path.size() - 6) == ".jsonl")
        write_trace_jsonl(t, out);
    else
        write_trace_csv(t, out);
}

SensorTrace resample(const SensorTrace& t, double target_rate_hz) {
    check_trace_level(t);
    if (!(target_rate_hz > 0.0))
        raise(errc::invariant_violation, "target rate must be positive");
    if (target_rate_hz > t.nominal_rate_hz * (1.0 + 1e-9))
        raise(errc::rate_too_high,
              fmt::format("target rate {} Hz exceeds nominal {} Hz", target_rate_hz,
                          t.nominal_rate_hz));
    SensorTrace out;
    out.nominal_rate_hz = target_rate_hz;
    out.anchor_epoch_s = t.anchor_epoch_s;
    const double t0 = t.samples.front().t;
    const double duration = t.duration_s();
    const std::size_t ticks = static_cast<std::size_t>(std::floor(duration * target_rate_hz)) + 1;
    std::size_t cursor = 0;
    std::size_t last_taken = static_cast<std::size_t>(-1);
    for (std::size_t k = 0; k < ticks; ++k) {
        const double target = t0 + static_cast<double>(k) / target_rate_hz;
        while (cursor + 1 < t.samples.size() &&
               std::abs(t.samples[cursor + 1].t - target) <=
                   std::abs(t.samples[cursor].t - target))
            ++cursor;
        if (cursor != last_taken) {
            out.samples.push_back(t.samples[cursor]);
            last_taken = cursor;
        }
    }
    return out;
}

} // namespace pintrack
