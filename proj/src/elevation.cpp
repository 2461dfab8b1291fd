#include "pintrack/estimators/elevation.hpp"

#include "pintrack/errors.hpp"

#include <cmath>

namespace pintrack {

double pressure_to_elevation(double pressure_hpa, const WeatherReport& w) {
    if (pressure_hpa <= 0.0)
        raise(errc::invariant_violation, "pressure must be positive");
    return w.station_elevation_m +
           (w.temperature_k / w.c_k_per_m) * std::log(w.station_pressure_hpa / pressure_hpa);
}

double elevation_to_pressure(double elevation_m, const WeatherReport& w) {
    return w.station_pressure_hpa *
           std::exp(-(elevation_m - w.station_elevation_m) * w.c_k_per_m / w.temperature_k);
}

} // namespace pintrack
