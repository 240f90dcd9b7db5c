#include "cascade/timeparse.hpp"

#include "cascade/errors.hpp"

#include <cmath>
#include <cstdio>

namespace cascade::timeutil {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

[[noreturn]] void fail(std::string_view text) {
    throw ParseError("invalid ISO-8601 timestamp '" + std::string(text) + "'");
}

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    return a / b - ((a % b != 0 && (a % b < 0) != (b < 0)) ? 1 : 0);
}

unsigned days_in_month(int y, unsigned m) {
    constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29u : 28u;
    }
    return lengths[m - 1];
}

} // namespace

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

double parse_iso8601(std::string_view text) {
    std::string_view s = text;
    if (s.size() < 10) fail(text);
    if (s[4] != '-' || s[7] != '-') fail(text);
    std::string_view ys = s.substr(0, 4), ms = s.substr(5, 2), ds = s.substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds)) fail(text);
    const int year = to_int(ys);
    const unsigned month = static_cast<unsigned>(to_int(ms));
    const unsigned day = static_cast<unsigned>(to_int(ds));
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) fail(text);

    s.remove_prefix(10);
    int hh = 0, mm = 0;
    double sec = 0.0;
    double offset_seconds = 0.0;
    if (!s.empty()) {
        if (s[0] != 'T' && s[0] != ' ') fail(text);
        s.remove_prefix(1);
        if (s.size() < 5 || s[2] != ':') fail(text);
        if (!all_digits(s.substr(0, 2)) || !all_digits(s.substr(3, 2))) fail(text);
        hh = to_int(s.substr(0, 2));
        mm = to_int(s.substr(3, 2));
        s.remove_prefix(5);
        if (!s.empty() && s[0] == ':') {
            s.remove_prefix(1);
            if (s.size() < 2 || !all_digits(s.substr(0, 2))) fail(text);
            sec = to_int(s.substr(0, 2));
            s.remove_prefix(2);
            if (!s.empty() && s[0] == '.') {
                s.remove_prefix(1);
                std::size_t n = 0;
                double frac = 0.0, scale = 0.1;
                while (n < s.size() && s[n] >= '0' && s[n] <= '9') {
                    frac += (s[n] - '0') * scale;
                    scale *= 0.1;
                    ++n;
                }
                if (n == 0) fail(text);
                sec += frac;
                s.remove_prefix(n);
            }
        }
        if (!s.empty()) {
            if (s[0] == 'Z') {
                s.remove_prefix(1);
            } else if (s[0] == '+' || s[0] == '-') {
                const double sign = s[0] == '+' ? 1.0 : -1.0;
                s.remove_prefix(1);
                if (s.size() < 5 || s[2] != ':' || !all_digits(s.substr(0, 2)) ||
                    !all_digits(s.substr(3, 2)))
                    fail(text);
                offset_seconds = sign * (to_int(s.substr(0, 2)) * 3600 + to_int(s.substr(3, 2)) * 60);
                s.remove_prefix(5);
            }
        }
        if (!s.empty()) fail(text);
        if (hh > 23 || mm > 59 || sec >= 61.0) fail(text);
    }

    const double base = static_cast<double>(days_from_civil(year, month, day)) * 86400.0;
    return base + hh * 3600.0 + mm * 60.0 + sec - offset_seconds;
}

std::string format_date(double epoch_seconds) {
    const auto days = static_cast<std::int64_t>(floor_div(static_cast<std::int64_t>(std::floor(epoch_seconds)), 86400));
    const CivilDate c = civil_from_days(days);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
    return buf;
}

std::string format_month(double epoch_seconds) {
    const auto days = static_cast<std::int64_t>(floor_div(static_cast<std::int64_t>(std::floor(epoch_seconds)), 86400));
    const CivilDate c = civil_from_days(days);
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", c.year, c.month);
    return buf;
}

int hour_of_day(double epoch_seconds) {
    const std::int64_t t = static_cast<std::int64_t>(std::floor(epoch_seconds));
    std::int64_t sec_of_day = t - floor_div(t, 86400) * 86400;
    return static_cast<int>(sec_of_day / 3600);
}

int hour_of_week(double epoch_seconds) {
    const std::int64_t t = static_cast<std::int64_t>(std::floor(epoch_seconds));
    const std::int64_t days = floor_div(t, 86400);
    // 1970-01-01 was a Thursday; Monday-based weekday index.
    std::int64_t dow = (days + 3) % 7;
    if (dow < 0) dow += 7;
    return static_cast<int>(dow) * 24 + hour_of_day(epoch_seconds);
}

} // namespace cascade::timeutil
