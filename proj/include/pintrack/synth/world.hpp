#pragma once

#include "pintrack/auxdata.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pintrack::synth {

// A synthetic city: a jittered street lattice over smooth relief, with a
// weather station, an address block, and optional transport tables.
struct CityParams {
    std::uint64_t seed = 1;
    std::string name = "alta";
    int n_intersections = 100;
    double spacing_m = 100.0;
    double grid_fraction = 0.7;  // 1 = perfect lattice, lower shifts corners
    // Fraction of lattice streets kept (connectivity is repaired afterwards).
    // A full grid is maximally ambiguous for route matching: every hypothesis
    // can always continue straight, so wrong start points survive any number
    // of turns. Thinning the grid breaks that symmetry.
    double street_fraction = 0.6;
    double relief_sigma_m = 5.0;
    // Relief wavelengths: short enough that neighboring intersections differ
    // by a few meters, which is what lets elevation checks separate routes.
    double relief_wavelength_min_m = 180.0;
    double relief_wavelength_max_m = 420.0;
    double origin_lat = 45.0;
    double origin_lon = 7.0;
    int tz_minutes = 0;
    int ip_octet = 1;            // city address block 10.<octet>.0.0/16
};

// Smooth scalar relief: a fixed sum of cosine plane waves with wavelengths
// of a few city blocks, so nearby intersections still differ.
class ElevationField {
public:
    ElevationField() = default;
    ElevationField(std::uint64_t seed, double sigma_m, double wavelength_min_m,
                   double wavelength_max_m, double origin_lat, double origin_lon);
    double operator()(double lat, double lon) const;

private:
    struct Wave {
        double kx = 0.0, ky = 0.0, phase = 0.0, amp = 0.0;
    };
    std::vector<Wave> waves_;
    double origin_lat_ = 0.0, origin_lon_ = 0.0;
};

struct World {
    CityParams params;
    MapXmlData map_xml;
    RoadGraph graph;     // collapsed, elevations attached
    ElevationField field;
    WeatherReport weather;
    std::vector<AirportRecord> airports; // airports this city's aux knows
    std::vector<FlightEntry> flights;    // departures board
    TrainTimetable trains;
    TrainHeadings train_headings;
    std::string ip_cidr;
    std::string home_ip;

    // Lattice shape and vertex lookup for route planning.
    int cols = 0, rows = 0;
    std::vector<std::int32_t> lattice; // (col, row) -> vertex index or -1
    // Street presence per vertex, direction order E, N, W, S.
    std::vector<std::array<bool, 4>> streets;

    std::int32_t vertex_at(int col, int row) const {
        if (col < 0 || row < 0 || col >= cols || row >= rows) return -1;
        return lattice[static_cast<std::size_t>(row * cols + col)];
    }
    bool has_street(std::int32_t vertex, int dir) const {
        return vertex >= 0 && streets[static_cast<std::size_t>(vertex)][dir & 3];
    }
};

World gen_city(const CityParams& p);

// Airport sited at an offset from the city's center, outside the street
// grid. The record is appended to the world's airport list.
AirportRecord add_airport(World& w, const std::string& code, double east_m,
                          double north_m, double elevation_m);

// Gate-to-gate timetable entry, appended to the departure city's board.
FlightEntry add_flight(World& dep, const AirportRecord& from, const AirportRecord& to,
                       std::int64_t gate_out_epoch_s, std::int64_t gate_in_epoch_s);

// Airport database for matcher studies: positions spread over a continent,
// elevations over [0, 600] m, four timezone blocks.
std::vector<AirportRecord> gen_airports(std::uint64_t seed, std::size_t n);

// Writes aux_root/<city>/... for every world plus the shared airports.csv
// (union over cities, deduplicated by code) and ip_cities.csv.
void write_aux_root(const std::vector<World>& cities, const std::string& root);

} // namespace pintrack::synth
