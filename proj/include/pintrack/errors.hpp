#pragma once

#include <stdexcept>
#include <string>

namespace pintrack {

// Every failure the library reports carries a stable machine-readable code.
// The CLI maps codes to exit codes and prints them as JSON on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

namespace errc {
// input / parsing
inline constexpr const char* parse_error = "ParseError";
inline constexpr const char* invariant_violation = "InvariantViolation";
inline constexpr const char* empty_trace = "EmptyTrace";
inline constexpr const char* rate_too_high = "RateTooHigh";
inline constexpr const char* malformed_xml = "MalformedXml";
inline constexpr const char* dangling_node_ref = "DanglingNodeRef";
inline constexpr const char* missing_elevation_tag = "MissingElevationTag";
inline constexpr const char* missing_vertex_elevation = "MissingVertexElevation";
inline constexpr const char* empty_dataset = "EmptyDataset";
inline constexpr const char* config_error = "ConfigError";
// lookups / matching
inline constexpr const char* no_match = "NoMatch";
inline constexpr const char* never_on_wifi = "NeverOnWiFi";
inline constexpr const char* length_mismatch = "LengthMismatch";
inline constexpr const char* misaligned = "Misaligned";
inline constexpr const char* unknown_experiment = "UnknownExperiment";
// classification
inline constexpr const char* chunk_too_short = "ChunkTooShort";
inline constexpr const char* insufficient_data = "InsufficientData";
inline constexpr const char* degenerate_class = "DegenerateClass";
// estimation
inline constexpr const char* no_candidates = "NoCandidates";
inline constexpr const char* not_driving = "NotDriving";
inline constexpr const char* not_walking = "NotWalking";
inline constexpr const char* phases_not_found = "PhasesNotFound";
inline constexpr const char* no_route = "NoRoute";
inline constexpr const char* no_stops_detected = "NoStopsDetected";
// pipeline
inline constexpr const char* city_unresolved = "CityUnresolved";
inline constexpr const char* missing_aux_bundle = "MissingAuxBundle";
} // namespace errc

[[noreturn]] inline void raise(const char* code, const std::string& what) {
    throw Error(code, what);
}

} // namespace pintrack
