#include "pintrack/synth/world.hpp"

#include "pintrack/errors.hpp"
#include "pintrack/geo.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace pintrack::synth {

using namespace geo;
namespace fs = std::filesystem;

ElevationField::ElevationField(std::uint64_t seed, double sigma_m,
                               double wavelength_min_m, double wavelength_max_m,
                               double origin_lat, double origin_lon)
    : origin_lat_(origin_lat), origin_lon_(origin_lon) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> wavelength(wavelength_min_m,
                                                      wavelength_max_m);
    constexpr int kWaves = 6;
    const double amp = sigma_m * std::sqrt(2.0 / kWaves);
    for (int i = 0; i < kWaves; ++i) {
        Wave w;
        const double k = 2.0 * kPi / wavelength(rng);
        const double dir = angle(rng);
        w.kx = k * std::cos(dir);
        w.ky = k * std::sin(dir);
        w.phase = angle(rng);
        w.amp = amp;
        waves_.push_back(w);
    }
}

double ElevationField::operator()(double lat, double lon) const {
    const double y = deg2rad(lat - origin_lat_) * kEarthRadiusM;
    const double x = deg2rad(lon - origin_lon_) * kEarthRadiusM *
                     std::cos(deg2rad(origin_lat_));
    double e = 0.0;
    for (const Wave& w : waves_)
        e += w.amp * std::cos(w.kx * x + w.ky * y + w.phase);
    return e;
}

namespace {

void local_to_lat_lon(const CityParams& p, double east_m, double north_m,
                      double& lat, double& lon) {
    lat = p.origin_lat + rad2deg(north_m / kEarthRadiusM);
    lon = p.origin_lon +
          rad2deg(east_m / (kEarthRadiusM * std::cos(deg2rad(p.origin_lat))));
}

} // namespace

World gen_city(const CityParams& p) {
    if (p.n_intersections < 4)
        raise(errc::config_error, "a city needs at least 4 intersections");

    World w;
    w.params = p;
    w.field = ElevationField(p.seed, p.relief_sigma_m, p.relief_wavelength_min_m,
                             p.relief_wavelength_max_m, p.origin_lat, p.origin_lon);

    const int n = p.n_intersections;
    w.cols = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (w.cols < 2) w.cols = 2;
    w.rows = (n + w.cols - 1) / w.cols;
    w.lattice.assign(static_cast<std::size_t>(w.cols * w.rows), -1);

    std::mt19937_64 rng(p.seed);
    const double frac = std::clamp(p.grid_fraction, 0.0, 1.0);
    const double jitter = 0.22 * (1.0 - frac) * p.spacing_m;
    std::uniform_real_distribution<double> jit(-jitter, jitter);
    std::uniform_real_distribution<double> mid_jit(-3.0, 3.0);

    // Row-major fill: the last row may be ragged when n is not a multiple of
    // the column count.
    struct Pos {
        double east, north;
    };
    std::vector<Pos> pos;
    for (int idx = 0; idx < n; ++idx) {
        const int row = idx / w.cols;
        const int col = idx % w.cols;
        w.lattice[static_cast<std::size_t>(row * w.cols + col)] = idx;
        Pos q{col * p.spacing_m + (jitter > 0 ? jit(rng) : 0.0),
              row * p.spacing_m + (jitter > 0 ? jit(rng) : 0.0)};
        pos.push_back(q);
        MapXmlNode node;
        node.id = 1000 + idx;
        local_to_lat_lon(p, q.east, q.north, node.lat, node.lon);
        node.ele = w.field(node.lat, node.lon);
        w.map_xml.nodes.push_back(node);
    }

    // Candidate streets join lattice neighbors. A fraction is dropped, then
    // connectivity is repaired so no intersection is stranded.
    struct Cand {
        int a, b;  // vertex indices, b east or north of a
        int dir_a; // 0 = b is east of a, 1 = b is north of a
        bool keep;
    };
    std::vector<Cand> cands;
    for (int idx = 0; idx < n; ++idx) {
        const int row = idx / w.cols;
        const int col = idx % w.cols;
        const std::int32_t east = w.vertex_at(col + 1, row);
        const std::int32_t north = w.vertex_at(col, row + 1);
        if (east >= 0) cands.push_back({idx, east, 0, false});
        if (north >= 0) cands.push_back({idx, north, 1, false});
    }
    const double sf = std::clamp(p.street_fraction, 0.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (Cand& c : cands) c.keep = coin(rng) < sf;

    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    for (const Cand& c : cands)
        if (c.keep) parent[static_cast<std::size_t>(find(c.a))] = find(c.b);
    std::vector<std::size_t> order(cands.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
        Cand& c = cands[i];
        if (c.keep || find(c.a) == find(c.b)) continue;
        c.keep = true;
        parent[static_cast<std::size_t>(find(c.a))] = find(c.b);
    }

    // Every few streets carry an interior shape point slightly off the
    // straight line, so the graph builder's chain collapsing is exercised by
    // every generated map.
    std::int64_t way_id = 1;
    std::int64_t shape_id = 500000;
    w.streets.assign(static_cast<std::size_t>(n), {false, false, false, false});
    for (const Cand& c : cands) {
        if (!c.keep) continue;
        w.streets[static_cast<std::size_t>(c.a)][c.dir_a] = true;
        w.streets[static_cast<std::size_t>(c.b)][c.dir_a + 2] = true;
        MapXmlWay way;
        way.id = way_id;
        if (way_id % 7 == 3) {
            MapXmlNode mid;
            mid.id = shape_id++;
            const double east = 0.5 * (pos[c.a].east + pos[c.b].east) + mid_jit(rng);
            const double north = 0.5 * (pos[c.a].north + pos[c.b].north) + mid_jit(rng);
            local_to_lat_lon(p, east, north, mid.lat, mid.lon);
            mid.ele = w.field(mid.lat, mid.lon);
            w.map_xml.nodes.push_back(mid);
            way.nds = {1000 + c.a, mid.id, 1000 + c.b};
        } else {
            way.nds = {1000 + c.a, 1000 + c.b};
        }
        ++way_id;
        w.map_xml.ways.push_back(way);
    }

    w.graph = build_road_graph(w.map_xml);
    attach_elevations(w.graph, [&w](double lat, double lon) { return w.field(lat, lon); });

    w.weather.city = p.name;
    w.weather.valid_epoch_s = 0;

    w.ip_cidr = fmt::format("10.{}.0.0/16", p.ip_octet);
    w.home_ip = fmt::format("10.{}.3.7", p.ip_octet);
    return w;
}

AirportRecord add_airport(World& w, const std::string& code, double east_m,
                          double north_m, double elevation_m) {
    double lat_lo, lon_lo, lat_hi, lon_hi;
    w.graph.bbox(lat_lo, lon_lo, lat_hi, lon_hi);
    AirportRecord a;
    a.code = code;
    move_m(0.5 * (lat_lo + lat_hi), 0.5 * (lon_lo + lon_hi),
           norm360(rad2deg(std::atan2(east_m, north_m))),
           std::hypot(east_m, north_m), a.lat, a.lon);
    a.elevation_m = elevation_m;
    a.tz_minutes = w.params.tz_minutes;
    w.airports.push_back(a);
    return a;
}

FlightEntry add_flight(World& dep, const AirportRecord& from, const AirportRecord& to,
                       std::int64_t gate_out_epoch_s, std::int64_t gate_in_epoch_s) {
    FlightEntry e;
    e.dep = from.code;
    e.dst = to.code;
    e.takeoff_epoch_s = gate_out_epoch_s;
    e.landing_epoch_s = gate_in_epoch_s;
    dep.flights.push_back(e);
    return e;
}

std::vector<AirportRecord> gen_airports(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed ^ 0xa5a5a5a5deadbeefULL);
    std::uniform_real_distribution<double> lat(25.0, 65.0);
    std::uniform_real_distribution<double> lon(-30.0, 40.0);
    std::uniform_real_distribution<double> elev(0.0, 600.0);
    constexpr int kZones[4] = {-360, -60, 60, 360};
    std::vector<AirportRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        AirportRecord a;
        a.code = fmt::format("AP{:02}", i);
        a.lat = lat(rng);
        a.lon = lon(rng);
        a.elevation_m = elev(rng);
        a.tz_minutes = kZones[i % 4];
        out.push_back(a);
    }
    return out;
}

void write_aux_root(const std::vector<World>& cities, const std::string& root) {
    fs::create_directories(root);

    std::vector<AirportRecord> all_airports;
    for (const World& w : cities)
        for (const AirportRecord& a : w.airports) {
            bool seen = false;
            for (const AirportRecord& have : all_airports)
                if (have.code == a.code) seen = true;
            if (!seen) all_airports.push_back(a);
        }

    for (const World& w : cities) {
        const fs::path dir = fs::path(root) / w.params.name;
        fs::create_directories(dir);
        {
            std::ofstream out(dir / "map.xml");
            write_map_xml(w.map_xml, out);
        }
        {
            std::ofstream out(dir / "weather.json");
            write_weather_json(w.weather, out);
        }
        {
            std::ofstream out(dir / "flights.csv");
            write_flights_csv(w.flights, out);
        }
        if (!w.trains.runs.empty()) {
            std::ofstream out(dir / "trains.csv");
            write_trains_csv(w.trains, out);
        }
        if (!w.train_headings.empty()) {
            std::ofstream out(dir / "train_headings.csv");
            write_train_headings_csv(w.train_headings, out);
        }
    }
    {
        std::ofstream out(fs::path(root) / "airports.csv");
        write_airports_csv(all_airports, out);
    }
    {
        std::ofstream out(fs::path(root) / "ip_cities.csv");
        out << "cidr,city\n";
        for (const World& w : cities)
            out << fmt::format("{},{}\n", w.ip_cidr, w.params.name);
    }
}

} // namespace pintrack::synth
