#include "pintrack/utc.hpp"

#include "pintrack/errors.hpp"

#include <fmt/format.h>

#include <cctype>

namespace pintrack::utc {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

int parse_fixed_int(const std::string& s, size_t pos, size_t len) {
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
            raise(errc::parse_error, "bad timestamp: " + s);
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

} // namespace

std::int64_t parse_rfc3339(const std::string& s) {
    // YYYY-MM-DDThh:mm:ss[.frac](Z|+hh:mm|-hh:mm)
    if (s.size() < 20 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't') ||
        s[13] != ':' || s[16] != ':')
        raise(errc::parse_error, "bad timestamp: " + s);
    const int year = parse_fixed_int(s, 0, 4);
    const int month = parse_fixed_int(s, 5, 2);
    const int day = parse_fixed_int(s, 8, 2);
    const int hh = parse_fixed_int(s, 11, 2);
    const int mm = parse_fixed_int(s, 14, 2);
    const int ss = parse_fixed_int(s, 17, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31 || hh > 23 || mm > 59 || ss > 60)
        raise(errc::parse_error, "bad timestamp field: " + s);

    size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') { // fractional seconds: accepted, truncated
        ++pos;
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
            raise(errc::parse_error, "bad timestamp fraction: " + s);
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    if (pos >= s.size()) raise(errc::parse_error, "missing timezone: " + s);

    std::int64_t offset_s = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '+' ? 1 : -1;
        const int oh = parse_fixed_int(s, pos + 1, 2);
        if (pos + 3 >= s.size() || s[pos + 3] != ':')
            raise(errc::parse_error, "bad timezone offset: " + s);
        const int om = parse_fixed_int(s, pos + 4, 2);
        offset_s = sign * (oh * 3600 + om * 60);
        pos += 6;
    } else {
        raise(errc::parse_error, "bad timezone designator: " + s);
    }
    if (pos != s.size()) raise(errc::parse_error, "trailing characters in timestamp: " + s);

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    return days * 86400 + hh * 3600 + mm * 60 + ss - offset_s;
}

std::string format_rfc3339(std::int64_t epoch_s) {
    std::int64_t days = epoch_s / 86400;
    std::int64_t rem = epoch_s % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", y, m, d, rem / 3600,
                       (rem % 3600) / 60, rem % 60);
}

} // namespace pintrack::utc
