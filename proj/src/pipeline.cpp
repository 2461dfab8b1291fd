#include "pintrack/pipeline.hpp"

#include "pintrack/auxdata.hpp"
#include "pintrack/classify.hpp"
#include "pintrack/errors.hpp"
#include "pintrack/estimators/plane.hpp"
#include "pintrack/estimators/train.hpp"
#include "pintrack/estimators/trackers.hpp"
#include "pintrack/geo.hpp"
#include "pintrack/preprocess.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace pintrack {
using namespace geo;

using ordered_json = nlohmann::ordered_json;

namespace {

// Lazily loaded per-city aux data plus the shared tables. Bundles are heavy
// (full road graph), so each city loads at most once per run.
class AuxCache {
public:
    explicit AuxCache(std::string root) : root_(std::move(root)) {}

    const AuxBundle& bundle(const std::string& city) {
        auto it = bundles_.find(city);
        if (it == bundles_.end())
            it = bundles_.emplace(city, load_aux_bundle(root_, city)).first;
        return it->second;
    }

    const std::vector<std::string>& cities() {
        if (!cities_) cities_ = list_aux_cities(root_);
        return *cities_;
    }

    const std::vector<AirportRecord>& airports() {
        if (!airports_) airports_ = load_airports(root_);
        return *airports_;
    }

    const IpCityTable& ip_cities() {
        if (!ip_cities_) ip_cities_ = load_ip_cities(root_);
        return *ip_cities_;
    }

    // City whose map footprint sits closest to a point; used to hand the
    // pipeline over to the destination after a flight.
    std::string nearest_city(double lat, double lon) {
        std::string best;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& c : cities()) {
            double lat_lo, lon_lo, lat_hi, lon_hi;
            bundle(c).map.bbox(lat_lo, lon_lo, lat_hi, lon_hi);
            const double d = haversine_m(lat, lon, 0.5 * (lat_lo + lat_hi),
                                         0.5 * (lon_lo + lon_hi));
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (best.empty())
            raise(errc::missing_aux_bundle, "no city bundles under " + root_);
        return best;
    }

private:
    std::string root_;
    std::map<std::string, AuxBundle> bundles_;
    std::optional<std::vector<std::string>> cities_;
    std::optional<std::vector<AirportRecord>> airports_;
    std::optional<IpCityTable> ip_cities_;
};

const AirportRecord& airport_by_code(const std::vector<AirportRecord>& airports,
                                     const std::string& code) {
    for (const auto& a : airports)
        if (a.code == code) return a;
    raise(errc::no_match, "airport " + code + " missing from the database");
}

ActivityLabel label_chunk(const DataChunk& chunk, const RunConfig& cfg,
                          const ClassifierModel* model) {
    if (model) return classify_ml(extract_features(chunk, cfg.tailored.features), *model);
    return classify_tailored(chunk, cfg.tailored);
}

// The device saw WiFi at most once per day in practice; its address names the
// city where the trace starts (or resumes, if the fix lands mid-day).
struct CityFix {
    double t_s = 0.0;
    std::string city;
};

std::optional<CityFix> wifi_city_fix(const SensorTrace& trace, AuxCache& aux) {
    try {
        const LastWifi wifi = find_last_wifi_ip(trace);
        return CityFix{trace.samples[wifi.index].t, aux.ip_cities().lookup(wifi.ip)};
    } catch (const Error& e) {
        if (e.code() == errc::never_on_wifi || e.code() == errc::no_match) return {};
        throw;
    }
}

// Without a WiFi fix the day is only anchored if it contains a flight: the
// flight is matched against every city's departure board at once and the
// winning pair names both the starting and the ending city.
std::string bootstrap_city_from_flight(const std::vector<DataChunk>& chunks,
                                       AuxCache& aux, const RunConfig& cfg) {
    for (const auto& chunk : chunks) {
        if (chunk.label != ActivityLabel::plane) continue;
        FlightPhases phases;
        try {
            phases = detect_flight_phases(chunk, cfg.phase);
        } catch (const Error&) {
            continue;
        }
        std::optional<FlightCandidate> best;
        for (const auto& city : aux.cities()) {
            const AuxBundle& b = aux.bundle(city);
            const FlightFeatures obs =
                flight_features(chunk, phases, b.weather, b.weather);
            try {
                auto ranked = match_flights(obs, aux.airports(), b.flights, cfg.plane);
                if (!ranked.empty() &&
                    (!best || ranked.front().error < best->error))
                    best = ranked.front();
            } catch (const Error&) {
            }
        }
        if (best) {
            const AirportRecord& dep = airport_by_code(aux.airports(), best->dep);
            return aux.nearest_city(dep.lat, dep.lon);
        }
    }
    raise(errc::city_unresolved,
          "no WiFi address and no matchable flight to anchor a city");
}

// Endpoint of the previous resolved segment, seeding the next search.
struct LastLoc {
    bool set = false;
    double lat = 0.0, lon = 0.0;
};

TrajectorySegment gap_segment(const DataChunk& chunk, const std::string& note) {
    TrajectorySegment seg;
    seg.activity = chunk.label.value_or(ActivityLabel::unrecognized);
    seg.start_t_s = chunk.start_t();
    seg.end_t_s = chunk.end_t();
    seg.estimator = "gap";
    seg.note = note;
    return seg;
}

void append_candidate_rows(Trajectory& traj, std::size_t segment_index,
                           const RankedRoutes& routes) {
    for (std::size_t k = 0; k < routes.roots_per_turn.size(); ++k)
        traj.candidate_series.push_back({segment_index, k + 1,
                                          routes.roots_per_turn[k],
                                          routes.paths_per_turn[k]});
}

} // namespace

Trajectory run_pinme(const SensorTrace& trace, const std::string& aux_root,
                     const RunConfig& cfg) {
    validate(trace);
    AuxCache aux(aux_root);

    std::optional<ClassifierModel> model;
    if (cfg.method == "ml") {
        if (cfg.model_path.empty())
            raise(errc::config_error, "method ml needs a model file");
        model = load_model_file(cfg.model_path);
    } else if (cfg.method != "tailored") {
        raise(errc::config_error, "unknown method " + cfg.method);
    }

    const std::vector<DataChunk> raw = partition_stream(trace, cfg.partition);
    std::vector<ActivityLabel> labels;
    labels.reserve(raw.size());
    for (const auto& chunk : raw)
        labels.push_back(label_chunk(chunk, cfg, model ? &*model : nullptr));
    const std::vector<DataChunk> chunks = merge_chunks(raw, labels);

    // City state. The WiFi fix applies once its timestamp is reached (it
    // usually sits at the very start of the day); a matched flight moves the
    // state to the destination, and a WiFi fix seen after landing wins back.
    std::optional<CityFix> pending_fix = wifi_city_fix(trace, aux);
    std::string city;
    if (!pending_fix) city = bootstrap_city_from_flight(chunks, aux, cfg);

    Trajectory traj;
    LastLoc last_loc;

    for (const auto& chunk : chunks) {
        if (pending_fix && pending_fix->t_s <= chunk.end_t()) {
            city = pending_fix->city;
            last_loc.set = false;
            pending_fix.reset();
        }
        if (traj.initial_city.empty()) traj.initial_city = city;

        const ActivityLabel activity = *chunk.label;
        if (activity == ActivityLabel::unrecognized) {
            traj.segments.push_back(gap_segment(chunk, "Unrecognized"));
            continue;
        }
        if (city.empty()) {
            traj.segments.push_back(gap_segment(chunk, errc::city_unresolved));
            continue;
        }

        TrajectorySegment seg;
        seg.activity = activity;
        seg.start_t_s = chunk.start_t();
        seg.end_t_s = chunk.end_t();

        try {
            const AuxBundle& b = aux.bundle(city);
            std::optional<SeedArea> seed;
            if (last_loc.set && b.map.contains(last_loc.lat, last_loc.lon))
                seed = SeedArea{last_loc.lat, last_loc.lon, cfg.seed_half_side_m};

            switch (activity) {
                case ActivityLabel::driving: {
                    RankedRoutes routes =
                        car_tracker(chunk, b.map, b.weather, seed, cfg.car);
                    const CandidatePath& top = routes.paths.front();
                    seg.estimator = "car";
                    seg.path = path_lat_lon(b.map, top);
                    seg.error = top.error;
                    seg.candidates = routes.paths.size();
                    append_candidate_rows(traj, traj.segments.size(), routes);
                    last_loc = {true, seg.path.back().first, seg.path.back().second};
                    break;
                }
                case ActivityLabel::walking: {
                    RankedRoutes routes =
                        walking_tracker(chunk, b.map, b.weather, seed, cfg.walk);
                    const CandidatePath& top = routes.paths.front();
                    seg.estimator = "walk";
                    seg.path = path_lat_lon(b.map, top);
                    seg.error = top.error;
                    seg.candidates = routes.paths.size();
                    append_candidate_rows(traj, traj.segments.size(), routes);
                    last_loc = {true, seg.path.back().first, seg.path.back().second};
                    break;
                }
                case ActivityLabel::train: {
                    const TravelIntervals obs =
                        extract_travel_intervals(chunk, cfg.train_stops);
                    auto ranked =
                        train_tracker(obs, b.trains, b.train_headings, cfg.train);
                    const TrainCandidate& top = ranked.front();
                    seg.estimator = "train";
                    seg.places = top.stations;
                    seg.error = top.d_minutes;
                    seg.candidates = ranked.size();
                    // the timetable carries no coordinates, so the chain of
                    // seed boxes breaks here
                    last_loc.set = false;
                    break;
                }
                case ActivityLabel::plane: {
                    auto ranked = plane_tracker(chunk, aux.airports(), b.flights,
                                                b.weather, b.weather, cfg.plane);
                    const FlightCandidate& top = ranked.front();
                    const AirportRecord& dep =
                        airport_by_code(aux.airports(), top.dep);
                    const AirportRecord& dst =
                        airport_by_code(aux.airports(), top.dst);
                    seg.estimator = "plane";
                    seg.path = {{dep.lat, dep.lon}, {dst.lat, dst.lon}};
                    seg.places = {dep.code, dst.code};
                    seg.error = top.error;
                    seg.candidates = ranked.size();
                    city = aux.nearest_city(dst.lat, dst.lon);
                    last_loc = {true, dst.lat, dst.lon};
                    break;
                }
                case ActivityLabel::unrecognized:
                    break;
            }
        } catch (const Error& e) {
            traj.segments.push_back(gap_segment(chunk, e.code()));
            last_loc.set = false;
            continue;
        }
        traj.segments.push_back(std::move(seg));
    }

    if (traj.initial_city.empty()) traj.initial_city = city;
    return traj;
}

// ------------------------------------------------------------------- writers

void write_trajectory_geojson(const Trajectory& t, std::ostream& out) {
    ordered_json root;
    root["type"] = "FeatureCollection";
    root["initial_city"] = t.initial_city;
    root["features"] = ordered_json::array();
    for (std::size_t i = 0; i < t.segments.size(); ++i) {
        const TrajectorySegment& s = t.segments[i];
        ordered_json f;
        f["type"] = "Feature";
        ordered_json props;
        props["segment"] = i;
        props["activity"] = to_string(s.activity);
        props["start_t_s"] = s.start_t_s;
        props["end_t_s"] = s.end_t_s;
        props["estimator"] = s.estimator;
        props["error"] = s.error;
        props["candidates"] = s.candidates;
        if (!s.places.empty()) props["places"] = s.places;
        if (!s.note.empty()) props["note"] = s.note;
        f["properties"] = std::move(props);
        if (s.path.empty()) {
            f["geometry"] = nullptr;
        } else {
            ordered_json coords = ordered_json::array();
            for (const auto& [lat, lon] : s.path)
                coords.push_back(ordered_json::array({lon, lat}));
            f["geometry"] =
                ordered_json{{"type", "LineString"}, {"coordinates", std::move(coords)}};
        }
        root["features"].push_back(std::move(f));
    }
    out << root.dump(2) << '\n';
}

void write_candidates_csv(const Trajectory& t, std::ostream& out) {
    out << "segment,turn,roots,paths\n";
    for (const CandidateRow& r : t.candidate_series)
        out << fmt::format("{},{},{},{}\n", r.segment, r.turn, r.roots, r.paths);
}

Trajectory load_trajectory_geojson(std::istream& in) {
    ordered_json root;
    try {
        root = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("trajectory: ") + e.what());
    }
    if (root.value("type", "") != "FeatureCollection")
        raise(errc::parse_error, "trajectory: not a FeatureCollection");
    Trajectory t;
    t.initial_city = root.value("initial_city", "");
    for (const auto& f : root.value("features", ordered_json::array())) {
        const auto& props = f.at("properties");
        TrajectorySegment s;
        s.activity = activity_from_string(props.at("activity").get<std::string>());
        s.start_t_s = props.at("start_t_s").get<double>();
        s.end_t_s = props.at("end_t_s").get<double>();
        s.estimator = props.value("estimator", "");
        s.error = props.value("error", 0.0);
        s.candidates = props.value("candidates", std::size_t{0});
        if (props.contains("places"))
            for (const auto& p : props["places"]) s.places.push_back(p.get<std::string>());
        s.note = props.value("note", "");
        if (f.contains("geometry") && !f["geometry"].is_null())
            for (const auto& c : f["geometry"].at("coordinates"))
                s.path.emplace_back(c.at(1).get<double>(), c.at(0).get<double>());
        t.segments.push_back(std::move(s));
    }
    return t;
}

Trajectory load_trajectory_geojson_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::parse_error, "cannot open " + path);
    return load_trajectory_geojson(in);
}

// ------------------------------------------------------------------- scoring

std::vector<TruthSegment> load_ground_truth(std::istream& in) {
    ordered_json root;
    try {
        root = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        raise(errc::parse_error, std::string("ground truth: ") + e.what());
    }
    if (!root.contains("segments") || !root["segments"].is_array())
        raise(errc::parse_error, "ground truth: missing segments array");
    std::vector<TruthSegment> out;
    for (const auto& j : root["segments"]) {
        TruthSegment s;
        s.activity = activity_from_string(j.at("activity").get<std::string>());
        s.start_t_s = j.at("start_t_s").get<double>();
        s.end_t_s = j.at("end_t_s").get<double>();
        if (j.contains("path"))
            for (const auto& p : j["path"])
                s.path.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        if (j.contains("places"))
            for (const auto& p : j["places"]) s.places.push_back(p.get<std::string>());
        s.distance_m = j.value("distance_m", 0.0);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<TruthSegment> load_ground_truth_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::parse_error, "cannot open " + path);
    return load_ground_truth(in);
}

namespace {

bool paths_agree(const std::vector<std::pair<double, double>>& a,
                 const std::vector<std::pair<double, double>>& b) {
    if (a.size() != b.size() || a.empty()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (haversine_m(a[i].first, a[i].second, b[i].first, b[i].second) > 1.0)
            return false;
    return true;
}

double overlap_s(double a0, double a1, double b0, double b1) {
    return std::min(a1, b1) - std::max(a0, b0);
}

} // namespace

Metrics evaluate(const Trajectory& t, const std::vector<TruthSegment>& truth) {
    Metrics m;
    double approx_sum = 0.0;
    std::size_t approx_n = 0;

    for (const TrajectorySegment& seg : t.segments) {
        if (seg.estimator == "gap") {
            ++m.gap_count;
            continue;
        }
        const TruthSegment* best = nullptr;
        double best_overlap = 0.0;
        for (const TruthSegment& ts : truth) {
            if (ts.activity != seg.activity) continue;
            const double ov =
                overlap_s(seg.start_t_s, seg.end_t_s, ts.start_t_s, ts.end_t_s);
            if (ov > best_overlap) {
                best_overlap = ov;
                best = &ts;
            }
        }
        if (!best)
            raise(errc::misaligned,
                  fmt::format("no {} ground truth overlaps [{:.0f}, {:.0f}] s",
                              to_string(seg.activity), seg.start_t_s, seg.end_t_s));

        SegmentScore score;
        score.activity = seg.activity;
        score.matched = true;
        ++m.matched_count;

        if (!seg.path.empty() && !best->path.empty()) {
            score.endpoint_error_m =
                haversine_m(seg.path.back().first, seg.path.back().second,
                            best->path.back().first, best->path.back().second);
            if (best->distance_m > 0.0)
                score.approx_error = score.endpoint_error_m / best->distance_m;
        }
        if (seg.activity == ActivityLabel::train ||
            seg.activity == ActivityLabel::plane)
            score.route_correct = !seg.places.empty() && seg.places == best->places;
        else
            score.route_correct = paths_agree(seg.path, best->path);

        if (score.route_correct) ++m.route_correct_count;
        if ((seg.activity == ActivityLabel::driving ||
             seg.activity == ActivityLabel::walking) &&
            best->distance_m > 0.0) {
            approx_sum += score.approx_error;
            ++approx_n;
        }
        m.segments.push_back(score);
    }
    m.mean_approx_error = approx_n ? approx_sum / static_cast<double>(approx_n) : 0.0;
    return m;
}

void write_metrics_json(const Metrics& m, std::ostream& out) {
    ordered_json root;
    root["segments"] = ordered_json::array();
    for (const SegmentScore& s : m.segments) {
        ordered_json j;
        j["activity"] = to_string(s.activity);
        j["endpoint_error_m"] = s.endpoint_error_m;
        j["approx_error"] = s.approx_error;
        j["route_correct"] = s.route_correct;
        j["matched"] = s.matched;
        root["segments"].push_back(std::move(j));
    }
    root["mean_approx_error"] = m.mean_approx_error;
    root["route_correct_count"] = m.route_correct_count;
    root["matched_count"] = m.matched_count;
    root["gap_count"] = m.gap_count;
    out << root.dump(2) << '\n';
}

} // namespace pintrack
