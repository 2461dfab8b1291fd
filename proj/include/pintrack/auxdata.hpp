#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pintrack {

// ---------------------------------------------------------------- road graph

struct Vertex {
    std::int64_t node_id = 0; // id from the source map
    double lat = 0.0, lon = 0.0;
    double elevation_m = 0.0; // NaN until an elevation source is attached
    std::vector<std::uint32_t> out_edges;
};

struct Edge {
    std::uint32_t from = 0, to = 0;
    double length_m = 0.0;    // accumulated along the original chain
    double bearing_deg = 0.0; // chord bearing at the from-end, [0, 360)
    std::uint32_t reverse = 0;
};

// Intersections-only graph: degree-2 chains of the source map are collapsed
// into single edges, every road contributes a forward and a reverse edge.
class RoadGraph {
public:
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t edge_count() const { return edges.size(); }

    std::optional<std::uint32_t> vertex_by_node_id(std::int64_t node_id) const;

    // Signed heading change when traveling into a vertex along in_edge and
    // leaving along out_edge (out_edge.from == in_edge.to). Positive is
    // clockwise, i.e. a right turn; straight through is ~0; (-180, 180].
    double turn_through(std::uint32_t in_edge, std::uint32_t out_edge) const;

    // Turn-table entry for an ordered pair of distinct edges leaving the same
    // vertex: the angle experienced arriving via reverse(a) and leaving via b.
    double turn_table_angle(std::uint32_t a, std::uint32_t b) const;

    bool has_all_elevations() const;
    void require_elevations() const; // MissingVertexElevation

    std::vector<std::uint32_t> vertices_in_box(double lat_lo, double lon_lo,
                                               double lat_hi, double lon_hi) const;
    void bbox(double& lat_lo, double& lon_lo, double& lat_hi, double& lon_hi) const;
    bool contains(double lat, double lon) const;
};

// Raw material for the map XML subset (<node> with optional ele tag, <way>
// with <nd> refs). The writer and parser are inverses over this shape.
struct MapXmlNode {
    std::int64_t id;
    double lat, lon;
    std::optional<double> ele;
};
struct MapXmlWay {
    std::int64_t id;
    std::vector<std::int64_t> nds;
};
struct MapXmlData {
    std::vector<MapXmlNode> nodes;
    std::vector<MapXmlWay> ways;
};

MapXmlData read_map_xml(std::istream& in);
void write_map_xml(const MapXmlData& data, std::ostream& out);

// Build the intersection graph. Vertices are nodes referenced by two or more
// ways plus way endpoints, ordered by node id. Elevations come from per-node
// ele tags when present.
RoadGraph build_road_graph(const MapXmlData& data);
RoadGraph parse_map_file(const std::string& path);

// Overwrites every vertex elevation from the source (idempotent). A source
// returning NaN for some vertex raises MissingVertexElevation.
using ElevationSource = std::function<double(double lat, double lon)>;
void attach_elevations(RoadGraph& g, const ElevationSource& source);

// ---------------------------------------------------------------- flat files

struct WeatherReport {
    std::string city;
    double station_pressure_hpa = 1013.25;
    double station_elevation_m = 0.0;
    double temperature_k = 288.15;
    double c_k_per_m = 0.0342; // inverse scale height times temperature
    std::int64_t valid_epoch_s = 0;
};

WeatherReport load_weather_json(std::istream& in);
WeatherReport load_weather_file(const std::string& path);
void write_weather_json(const WeatherReport& w, std::ostream& out);

struct AirportRecord {
    std::string code;
    double lat = 0.0, lon = 0.0;
    double elevation_m = 0.0;
    int tz_minutes = 0;
};

std::vector<AirportRecord> load_airports_csv(std::istream& in);
std::vector<AirportRecord> load_airports_file(const std::string& path);
void write_airports_csv(const std::vector<AirportRecord>& a, std::ostream& out);

struct FlightEntry {
    std::string dep, dst;
    std::int64_t takeoff_epoch_s = 0;
    std::int64_t landing_epoch_s = 0;
    double duration_min() const {
        return static_cast<double>(landing_epoch_s - takeoff_epoch_s) / 60.0;
    }
};

std::vector<FlightEntry> load_flights_csv(std::istream& in);
std::vector<FlightEntry> load_flights_file(const std::string& path);
void write_flights_csv(const std::vector<FlightEntry>& f, std::ostream& out);

struct TrainStop {
    std::string station;
    std::int64_t arrive_epoch_s = 0;
    std::int64_t depart_epoch_s = 0;
};

struct TrainRun {
    std::string train_id;
    std::vector<TrainStop> stops; // at least two, times strictly increasing
    const std::string& origin() const { return stops.front().station; }
    std::int64_t departure_epoch_s() const { return stops.front().depart_epoch_s; }
    // minutes from leaving stop i to reaching stop i+1
    std::vector<double> travel_intervals_min() const;
};

struct TrainTimetable {
    std::vector<TrainRun> runs;
};

TrainTimetable load_trains_csv(std::istream& in);
TrainTimetable load_trains_file(const std::string& path);
void write_trains_csv(const TrainTimetable& t, std::ostream& out);

using TrainHeadings = std::map<std::string, std::vector<double>>; // station -> track headings

TrainHeadings load_train_headings_csv(std::istream& in);
TrainHeadings load_train_headings_file(const std::string& path);
void write_train_headings_csv(const TrainHeadings& h, std::ostream& out);

// ----------------------------------------------------------------- ip lookup

class IpCityTable {
public:
    struct Entry {
        std::uint32_t prefix = 0;
        int len = 0;
        std::string city;
    };

    void add(const std::string& cidr, const std::string& city);
    // longest-prefix match; raises NoMatch when nothing covers the address
    std::string lookup(const std::string& ipv4) const;
    std::size_t size() const { return entries_.size(); }

    static std::uint32_t parse_ipv4(const std::string& s);

private:
    std::vector<Entry> entries_;
};

IpCityTable load_ip_cities_csv(std::istream& in);
IpCityTable load_ip_cities_file(const std::string& path);

// ---------------------------------------------------------------- aux bundle

// aux_root/
//   airports.csv  ip_cities.csv
//   <city>/map.xml  <city>/weather.json
//   <city>/flights.csv <city>/trains.csv <city>/train_headings.csv (optional)
struct AuxBundle {
    std::string city;
    RoadGraph map;
    WeatherReport weather;
    std::vector<FlightEntry> flights;
    TrainTimetable trains;
    TrainHeadings train_headings;
};

std::vector<std::string> list_aux_cities(const std::string& aux_root);
AuxBundle load_aux_bundle(const std::string& aux_root, const std::string& city);
std::vector<AirportRecord> load_airports(const std::string& aux_root);
IpCityTable load_ip_cities(const std::string& aux_root);

} // namespace pintrack
