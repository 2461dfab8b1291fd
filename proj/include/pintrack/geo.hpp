#pragma once

#include <cmath>

namespace pintrack::geo {

inline constexpr double kEarthRadiusM = 6371008.8; // mean radius
inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// Great-circle distance in meters.
inline double haversine_m(double lat1, double lon1, double lat2, double lon2) {
    const double p1 = deg2rad(lat1), p2 = deg2rad(lat2);
    const double dp = deg2rad(lat2 - lat1), dl = deg2rad(lon2 - lon1);
    const double a = std::sin(dp / 2) * std::sin(dp / 2) +
                     std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(a)));
}

// Normalize to [0, 360).
inline double norm360(double deg) {
    double d = std::fmod(deg, 360.0);
    if (d < 0) d += 360.0;
    // fmod can return 360.0 - eps rounding up; keep the invariant strict
    if (d >= 360.0) d -= 360.0;
    return d;
}

// Minimal signed difference a-b wrapped to [-180, 180).
inline double wrap180(double deg) {
    return deg - 360.0 * std::floor((deg + 180.0) / 360.0);
}

// Chord bearing between two points in a local planar approximation, degrees
// clockwise from north in [0, 360). Antisymmetric by construction: swapping
// the endpoints changes the result by exactly 180 degrees, which is what the
// road graph's reverse-edge invariant requires (a great-circle initial
// bearing is not antisymmetric at this tolerance).
inline double chord_bearing_deg(double lat1, double lon1, double lat2, double lon2) {
    const double midlat = deg2rad(0.5 * (lat1 + lat2));
    const double x = (lon2 - lon1) * std::cos(midlat);
    const double y = lat2 - lat1;
    return norm360(rad2deg(std::atan2(x, y)));
}

// Destination point moving dist meters along a bearing (planar local step;
// adequate for the sub-kilometer hops synthesis takes).
inline void move_m(double lat, double lon, double bearing_deg, double dist_m,
                   double& out_lat, double& out_lon) {
    const double b = deg2rad(bearing_deg);
    const double dn = dist_m * std::cos(b); // north
    const double de = dist_m * std::sin(b); // east
    out_lat = lat + rad2deg(dn / kEarthRadiusM);
    out_lon = lon + rad2deg(de / (kEarthRadiusM * std::cos(deg2rad(lat))));
}

} // namespace pintrack::geo
