#include <cstdint>

#include "cascade/errors.hpp"
#include "cascade/timeparse.hpp"
#include "doctest.h"

using namespace cascade;
using namespace cascade::timeutil;

TEST_CASE("epoch origin and whole dates") {
    CHECK(parse_iso8601("1970-01-01") == 0.0);
    CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0.0);
    CHECK(parse_iso8601("1970-01-02") == 86400.0);
    // 2016-01-01T00:00Z = 1451606400; 193 days later is 2016-07-12 (leap year).
    CHECK(parse_iso8601("2016-01-01") == 1451606400.0);
    CHECK(parse_iso8601("2016-07-12") == 1451606400.0 + 193 * 86400.0);
}

TEST_CASE("time of day, separators, fractions") {
    // 2016 is a leap year (366 days); Aug 8 is 219 days past 2017-01-01.
    const double d = 1451606400.0 + (366 + 219) * 86400.0;  // 2017-08-08
    CHECK(parse_iso8601("2017-08-08T12:30") == d + 45000.0);
    CHECK(parse_iso8601("2017-08-08 12:30:00") == d + 45000.0);
    CHECK(parse_iso8601("2017-08-08T12:30:15") == d + 45015.0);
    CHECK(parse_iso8601("2017-08-08T12:30:15.250Z") == d + 45015.25);
    CHECK(parse_iso8601("2016-07-12T00:00:00.500Z") == 1468281600.5);
}

TEST_CASE("utc offsets shift toward utc") {
    const double z = parse_iso8601("2017-08-08T12:30:00Z");
    CHECK(parse_iso8601("2017-08-08T14:30:00+02:00") == z);
    CHECK(parse_iso8601("2017-08-08T07:30:00-05:00") == z);
    CHECK(parse_iso8601("2017-08-08T12:30:00+00:00") == z);
}

TEST_CASE("rejects malformed timestamps") {
    CHECK_THROWS_AS(parse_iso8601(""), ParseError);
    CHECK_THROWS_AS(parse_iso8601("not a date"), ParseError);
    CHECK_THROWS_AS(parse_iso8601("2016-13-01"), ParseError);
    CHECK_THROWS_AS(parse_iso8601("2016-02-30"), ParseError);
    CHECK_THROWS_AS(parse_iso8601("2016-07-12T25:00"), ParseError);
    CHECK_THROWS_AS(parse_iso8601("2016-07-12T10:61"), ParseError);
    CHECK_THROWS_AS(parse_iso8601("2016-07-12T10:00:00X"), ParseError);
    CHECK_THROWS_AS(parse_iso8601("2016/07/12"), ParseError);
}

TEST_CASE("civil date conversions round-trip") {
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(2016, 7, 12) == 16994);
    for (std::int64_t day = -200000; day <= 200000; day += 137) {
        const CivilDate c = civil_from_days(day);
        CHECK(days_from_civil(c.year, c.month, c.day) == day);
    }
}

TEST_CASE("formatting") {
    CHECK(format_date(1468281600.0) == "2016-07-12");
    CHECK(format_date(1468281600.0 + 86399.0) == "2016-07-12");
    CHECK(format_month(1468281600.0) == "2016-07");
    CHECK(format_date(0.0) == "1970-01-01");
    CHECK(format_month(0.0) == "1970-01");
}

TEST_CASE("hour bins") {
    CHECK(hour_of_day(1468281600.0) == 0);
    CHECK(hour_of_day(1468281600.0 + 14 * 3600.0 + 59 * 60.0) == 14);
    // 2026-08-24 is a Monday.
    const double monday = 1787529600.0;
    CHECK(format_date(monday) == "2026-08-24");
    CHECK(hour_of_week(monday + 1800.0) == 0);
    CHECK(hour_of_week(monday + 13 * 3600.0) == 13);
    CHECK(hour_of_week(monday - 1800.0) == 167);   // Sunday 23:30
    CHECK(hour_of_week(monday + 7 * 86400.0) == 0);
}
