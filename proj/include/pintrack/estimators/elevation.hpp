#pragma once

#include "pintrack/auxdata.hpp"

namespace pintrack {

// Height from pressure against a reference station report:
//   H = H_s + (T / C) * ln(P_s / P)
// with C a lapse-like constant in K/m (default 0.0342).
double pressure_to_elevation(double pressure_hpa, const WeatherReport& w);

// Exact inverse of the above; used when fabricating barometer readings.
double elevation_to_pressure(double elevation_m, const WeatherReport& w);

} // namespace pintrack
