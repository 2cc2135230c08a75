#include <catch2/catch_amalgamated.hpp>

#include "exposome/dates.hpp"

using exposome::Date;

TEST_CASE("ISO dates parse and format round trip", "[dates]") {
  const auto date = Date::parse("2004-07-19");
  REQUIRE(date.has_value());
  CHECK(date->to_string() == "2004-07-19");

  CHECK(Date::parse("1970-01-01")->days_since_epoch() == 0);
  CHECK(Date::parse("1969-12-31")->days_since_epoch() == -1);
  CHECK(Date::parse("2000-03-01")->days_since_epoch() == 11017);
}

TEST_CASE("invalid dates are rejected", "[dates]") {
  CHECK_FALSE(Date::parse("").has_value());
  CHECK_FALSE(Date::parse("2004-7-19").has_value());
  CHECK_FALSE(Date::parse("2004/07/19").has_value());
  CHECK_FALSE(Date::parse("2004-13-01").has_value());
  CHECK_FALSE(Date::parse("2004-00-10").has_value());
  CHECK_FALSE(Date::parse("2004-02-30").has_value());
  CHECK_FALSE(Date::parse("2021-02-29").has_value());  // not a leap year
  CHECK(Date::parse("2020-02-29").has_value());
  CHECK_FALSE(Date::parse("2020-02-29 ").has_value());
  CHECK_FALSE(Date::parse("20ab-02-28").has_value());
}

TEST_CASE("day arithmetic crosses month and year boundaries", "[dates]") {
  const Date date = *Date::parse("1999-12-31");
  CHECK(date.plus_days(1).to_string() == "2000-01-01");
  CHECK(date.plus_days(366).to_string() == "2000-12-31");  // 2000 is a leap year
  CHECK(exposome::days_between(date, date.plus_days(366)) == 366);
  CHECK(date.plus_days(-365).to_string() == "1998-12-31");
}

TEST_CASE("round trip over a century of days", "[dates]") {
  const Date start = Date::from_ymd(1970, 1, 1);
  for (int offset = -20000; offset <= 20000; offset += 17) {
    const Date date = start.plus_days(offset);
    const auto reparsed = Date::parse(date.to_string());
    REQUIRE(reparsed.has_value());
    CHECK(reparsed->days_since_epoch() == date.days_since_epoch());
  }
}
