#include "specpilot/clock.hpp"

#include <cstdio>
#include <ctime>

#include "specpilot/errors.hpp"

namespace specpilot {

std::int64_t SystemClock::now()
{
    return static_cast<std::int64_t>(std::time(nullptr));
}

std::unique_ptr<Clock> SystemClock::lane(int)
{
    return std::make_unique<SystemClock>();
}

namespace {

std::tm to_utc(std::int64_t epoch_seconds)
{
    std::time_t t = static_cast<std::time_t>(epoch_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    return tm;
}

}  // namespace

std::string iso_utc(std::int64_t epoch_seconds)
{
    std::tm tm = to_utc(epoch_seconds);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string compact_utc(std::int64_t epoch_seconds)
{
    std::tm tm = to_utc(epoch_seconds);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d%02d%02dT%02d%02d%02dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::int64_t parse_iso_utc(const std::string& text)
{
    std::tm tm{};
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char z = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d%c", &y, &mo, &d, &h, &mi, &s, &z) != 7 ||
        z != 'Z') {
        throw InvalidArgumentError("expected UTC instant like 2026-01-01T00:00:00Z, got '" + text +
                                   "'");
    }
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    return static_cast<std::int64_t>(timegm(&tm));
}

}  // namespace specpilot
