#include "pintrack/auxdata.hpp"
#include "pintrack/errors.hpp"
#include "pintrack/utc.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pintrack {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

// Reads a CSV stream, checks the exact header, hands non-empty data rows to
// the row callback with 1-based line numbers.
template <typename F>
void for_each_csv_row(std::istream& in, const std::string& header, F&& row) {
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            if (line != header)
                raise(errc::parse_error,
                      fmt::format("line {}: expected header '{}'", lineno, header));
            have_header = true;
            continue;
        }
        row(split_csv_line(line), lineno);
    }
    if (!have_header) raise(errc::parse_error, "missing header: " + header);
}

double field_double(const std::vector<std::string>& f, std::size_t i, int line) {
    try {
        return std::stod(f.at(i));
    } catch (const std::exception&) {
        raise(errc::parse_error,
              fmt::format("line {}: field {} not numeric: '{}'", line, i, f.at(i)));
    }
}

std::ifstream open_or_raise(const std::string& path, const char* code) {
    std::ifstream in(path);
    if (!in) raise(code, "cannot open: " + path);
    return in;
}

} // namespace

// ------------------------------------------------------------------- weather

WeatherReport load_weather_json(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        raise(errc::parse_error, fmt::format("weather json: {}", e.what()));
    }
    WeatherReport w;
    try {
        w.city = j.at("city").get<std::string>();
        w.station_pressure_hpa = j.at("pressure_hpa").get<double>();
        w.station_elevation_m = j.at("elevation_m").get<double>();
        w.temperature_k = j.at("temperature_k").get<double>();
        if (j.contains("c_k_per_m")) w.c_k_per_m = j.at("c_k_per_m").get<double>();
        if (j.contains("valid_time"))
            w.valid_epoch_s = utc::parse_rfc3339(j.at("valid_time").get<std::string>());
    } catch (const json::exception& e) {
        raise(errc::parse_error, fmt::format("weather json: {}", e.what()));
    }
    if (!(w.station_pressure_hpa > 300.0 && w.station_pressure_hpa < 1100.0))
        raise(errc::invariant_violation, "weather pressure out of range");
    if (!(w.temperature_k > 150.0 && w.temperature_k < 350.0))
        raise(errc::invariant_violation, "weather temperature out of range");
    if (!(w.c_k_per_m > 0.0))
        raise(errc::invariant_violation, "weather c must be positive");
    return w;
}

WeatherReport load_weather_file(const std::string& path) {
    auto in = open_or_raise(path, errc::parse_error);
    return load_weather_json(in);
}

void write_weather_json(const WeatherReport& w, std::ostream& out) {
    json j{{"city", w.city},
           {"pressure_hpa", w.station_pressure_hpa},
           {"elevation_m", w.station_elevation_m},
           {"temperature_k", w.temperature_k},
           {"c_k_per_m", w.c_k_per_m},
           {"valid_time", utc::format_rfc3339(w.valid_epoch_s)}};
    out << j.dump(2) << '\n';
}

// ------------------------------------------------------------------ airports

std::vector<AirportRecord> load_airports_csv(std::istream& in) {
    std::vector<AirportRecord> out;
    for_each_csv_row(in, "code,lat,lon,elevation_m,tz_offset_hours",
                     [&](const std::vector<std::string>& f, int line) {
                         if (f.size() != 5)
                             raise(errc::parse_error,
                                   fmt::format("line {}: expected 5 fields", line));
                         AirportRecord a;
                         a.code = f[0];
                         a.lat = field_double(f, 1, line);
                         a.lon = field_double(f, 2, line);
                         a.elevation_m = field_double(f, 3, line);
                         a.tz_minutes =
                             static_cast<int>(std::lround(field_double(f, 4, line) * 60.0));
                         out.push_back(std::move(a));
                     });
    return out;
}

std::vector<AirportRecord> load_airports_file(const std::string& path) {
    auto in = open_or_raise(path, errc::parse_error);
    return load_airports_csv(in);
}

void write_airports_csv(const std::vector<AirportRecord>& a, std::ostream& out) {
    out << "code,lat,lon,elevation_m,tz_offset_hours\n";
    for (const auto& r : a)
        out << fmt::format("{},{},{},{},{}\n", r.code, r.lat, r.lon, r.elevation_m,
                           r.tz_minutes / 60.0);
}

// ------------------------------------------------------------------- flights

std::vector<FlightEntry> load_flights_csv(std::istream& in) {
    std::vector<FlightEntry> out;
    for_each_csv_row(
        in, "dep,dst,takeoff_utc,landing_utc",
        [&](const std::vector<std::string>& f, int line) {
            if (f.size() != 4)
                raise(errc::parse_error, fmt::format("line {}: expected 4 fields", line));
            FlightEntry e;
            e.dep = f[0];
            e.dst = f[1];
            e.takeoff_epoch_s = utc::parse_rfc3339(f[2]);
            e.landing_epoch_s = utc::parse_rfc3339(f[3]);
            if (e.landing_epoch_s <= e.takeoff_epoch_s)
                raise(errc::invariant_violation,
                      fmt::format("line {}: landing not after takeoff", line));
            out.push_back(std::move(e));
        });
    return out;
}

std::vector<FlightEntry> load_flights_file(const std::string& path) {
    auto in = open_or_raise(path, errc::parse_error);
    return load_flights_csv(in);
}

void write_flights_csv(const std::vector<FlightEntry>& f, std::ostream& out) {
    out << "dep,dst,takeoff_utc,landing_utc\n";
    for (const auto& e : f)
        out << fmt::format("{},{},{},{}\n", e.dep, e.dst,
                           utc::format_rfc3339(e.takeoff_epoch_s),
                           utc::format_rfc3339(e.landing_epoch_s));
}

// -------------------------------------------------------------------- trains

std::vector<double> TrainRun::travel_intervals_min() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < stops.size(); ++i)
        out.push_back(static_cast<double>(stops[i + 1].arrive_epoch_s -
                                          stops[i].depart_epoch_s) /
                      60.0);
    return out;
}

TrainTimetable load_trains_csv(std::istream& in) {
    TrainTimetable tt;
    for_each_csv_row(
        in, "train_id,station_id,arrive_utc,depart_utc",
        [&](const std::vector<std::string>& f, int line) {
            if (f.size() != 4)
                raise(errc::parse_error, fmt::format("line {}: expected 4 fields", line));
            TrainStop stop;
            stop.station = f[1];
            stop.depart_epoch_s = f[3].empty() ? 0 : utc::parse_rfc3339(f[3]);
            stop.arrive_epoch_s = f[2].empty() ? stop.depart_epoch_s : utc::parse_rfc3339(f[2]);
            if (f[3].empty()) stop.depart_epoch_s = stop.arrive_epoch_s;
            if (f[2].empty() && f[3].empty())
                raise(errc::parse_error,
                      fmt::format("line {}: stop needs arrive or depart time", line));
            if (tt.runs.empty() || tt.runs.back().train_id != f[0]) {
                tt.runs.push_back(TrainRun{f[0], {}});
            }
            auto& run = tt.runs.back();
            if (!run.stops.empty()) {
                const auto& prev = run.stops.back();
                if (!(stop.arrive_epoch_s > prev.depart_epoch_s))
                    raise(errc::invariant_violation,
                          fmt::format("line {}: stop times not increasing along train {}",
                                      line, f[0]));
            }
            if (stop.depart_epoch_s < stop.arrive_epoch_s)
                raise(errc::invariant_violation,
                      fmt::format("line {}: departure before arrival", line));
            run.stops.push_back(std::move(stop));
        });
    for (const auto& run : tt.runs)
        if (run.stops.size() < 2)
            raise(errc::invariant_violation,
                  fmt::format("train {} has fewer than 2 stops", run.train_id));
    return tt;
}

TrainTimetable load_trains_file(const std::string& path) {
    auto in = open_or_raise(path, errc::parse_error);
    return load_trains_csv(in);
}

void write_trains_csv(const TrainTimetable& t, std::ostream& out) {
    out << "train_id,station_id,arrive_utc,depart_utc\n";
    for (const auto& run : t.runs)
        for (std::size_t i = 0; i < run.stops.size(); ++i) {
            const auto& s = run.stops[i];
            out << fmt::format("{},{},{},{}\n", run.train_id, s.station,
                               i == 0 ? "" : utc::format_rfc3339(s.arrive_epoch_s),
                               utc::format_rfc3339(s.depart_epoch_s));
        }
}

TrainHeadings load_train_headings_csv(std::istream& in) {
    TrainHeadings out;
    for_each_csv_row(in, "station_id,heading_deg",
                     [&](const std::vector<std::string>& f, int line) {
                         if (f.size() != 2)
                             raise(errc::parse_error,
                                   fmt::format("line {}: expected 2 fields", line));
                         out[f[0]].push_back(field_double(f, 1, line));
                     });
    return out;
}

TrainHeadings load_train_headings_file(const std::string& path) {
    auto in = open_or_raise(path, errc::parse_error);
    return load_train_headings_csv(in);
}

void write_train_headings_csv(const TrainHeadings& h, std::ostream& out) {
    out << "station_id,heading_deg\n";
    for (const auto& [station, headings] : h)
        for (double deg : headings) out << fmt::format("{},{}\n", station, deg);
}

// ----------------------------------------------------------------- ip lookup

std::uint32_t IpCityTable::parse_ipv4(const std::string& s) {
    std::uint32_t parts[4];
    int idx = 0;
    std::string cur;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '.') {
            if (cur.empty() || idx >= 4)
                raise(errc::parse_error, "bad ipv4 address: " + s);
            try {
                const unsigned long v = std::stoul(cur);
                if (v > 255) throw std::out_of_range(cur);
                parts[idx++] = static_cast<std::uint32_t>(v);
            } catch (const std::exception&) {
                raise(errc::parse_error, "bad ipv4 octet in: " + s);
            }
            cur.clear();
        } else {
            cur += s[i];
        }
    }
    if (idx != 4) raise(errc::parse_error, "bad ipv4 address: " + s);
    return (parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3];
}

void IpCityTable::add(const std::string& cidr, const std::string& city) {
    const auto slash = cidr.find('/');
    if (slash == std::string::npos) raise(errc::parse_error, "cidr missing '/': " + cidr);
    const std::uint32_t addr = parse_ipv4(cidr.substr(0, slash));
    int len = 0;
    try {
        len = std::stoi(cidr.substr(slash + 1));
    } catch (const std::exception&) {
        raise(errc::parse_error, "bad prefix length: " + cidr);
    }
    if (len < 0 || len > 32) raise(errc::parse_error, "bad prefix length: " + cidr);
    const std::uint32_t mask = len == 0 ? 0u : ~std::uint32_t{0} << (32 - len);
    const std::uint32_t prefix = addr & mask;
    for (const auto& e : entries_)
        if (e.len == len && e.prefix == prefix && e.city != city)
            raise(errc::invariant_violation,
                  fmt::format("conflicting cities for prefix {}: {} vs {}", cidr, e.city,
                              city));
    entries_.push_back(Entry{prefix, len, city});
}

std::string IpCityTable::lookup(const std::string& ipv4) const {
    const std::uint32_t addr = parse_ipv4(ipv4);
    const Entry* best = nullptr;
    for (const auto& e : entries_) {
        const std::uint32_t mask = e.len == 0 ? 0u : ~std::uint32_t{0} << (32 - e.len);
        if ((addr & mask) == e.prefix && (!best || e.len > best->len)) best = &e;
    }
    if (!best) raise(errc::no_match, "no city covers address " + ipv4);
    return best->city;
}

IpCityTable load_ip_cities_csv(std::istream& in) {
    IpCityTable t;
    for_each_csv_row(in, "cidr,city", [&](const std::vector<std::string>& f, int line) {
        if (f.size() != 2)
            raise(errc::parse_error, fmt::format("line {}: expected 2 fields", line));
        t.add(f[0], f[1]);
    });
    return t;
}

IpCityTable load_ip_cities_file(const std::string& path) {
    auto in = open_or_raise(path, errc::parse_error);
    return load_ip_cities_csv(in);
}

// ---------------------------------------------------------------- aux bundle

std::vector<std::string> list_aux_cities(const std::string& aux_root) {
    std::vector<std::string> out;
    if (!fs::is_directory(aux_root))
        raise(errc::missing_aux_bundle, "aux root is not a directory: " + aux_root);
    for (const auto& entry : fs::directory_iterator(aux_root))
        if (entry.is_directory() && fs::exists(entry.path() / "map.xml"))
            out.push_back(entry.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

AuxBundle load_aux_bundle(const std::string& aux_root, const std::string& city) {
    const fs::path dir = fs::path(aux_root) / city;
    if (!fs::is_directory(dir))
        raise(errc::missing_aux_bundle,
              fmt::format("no aux bundle for city '{}' under {}", city, aux_root));
    const fs::path map_path = dir / "map.xml";
    const fs::path weather_path = dir / "weather.json";
    if (!fs::exists(map_path) || !fs::exists(weather_path))
        raise(errc::missing_aux_bundle,
              fmt::format("aux bundle for '{}' missing map.xml or weather.json", city));
    AuxBundle b;
    b.city = city;
    b.map = parse_map_file(map_path.string());
    b.weather = load_weather_file(weather_path.string());
    if (fs::exists(dir / "flights.csv"))
        b.flights = load_flights_file((dir / "flights.csv").string());
    if (fs::exists(dir / "trains.csv"))
        b.trains = load_trains_file((dir / "trains.csv").string());
    if (fs::exists(dir / "train_headings.csv"))
        b.train_headings = load_train_headings_file((dir / "train_headings.csv").string());
    return b;
}

std::vector<AirportRecord> load_airports(const std::string& aux_root) {
    const fs::path p = fs::path(aux_root) / "airports.csv";
    if (!fs::exists(p))
        raise(errc::missing_aux_bundle, "aux root missing airports.csv: " + aux_root);
    return load_airports_file(p.string());
}

IpCityTable load_ip_cities(const std::string& aux_root) {
    const fs::path p = fs::path(aux_root) / "ip_cities.csv";
    if (!fs::exists(p))
        raise(errc::missing_aux_bundle, "aux root missing ip_cities.csv: " + aux_root);
    return load_ip_cities_file(p.string());
}

} // namespace pintrack
