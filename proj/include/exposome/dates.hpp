#pragma once
// Minimal proleptic-Gregorian calendar date with strict ISO 8601 (YYYY-MM-DD)
// parsing and day arithmetic. Stored as days since 1970-01-01.

#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

namespace exposome {

// Hinnant's civil-calendar conversions.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr std::tuple<std::int64_t, unsigned, unsigned> civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {y + (m <= 2), m, d};
}

constexpr bool is_leap_year(std::int64_t y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr unsigned days_in_month(std::int64_t y, unsigned m) {
  constexpr std::array<unsigned, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap_year(y)) return 29;
  return lengths[m - 1];
}

class Date {
 public:
  constexpr Date() = default;

  static constexpr Date from_days(std::int32_t days) {
    Date d;
    d.days_ = days;
    return d;
  }

  // Requires a valid civil date; years limited to 0..9999 by the text format.
  static constexpr Date from_ymd(int year, unsigned month, unsigned day) {
    return from_days(static_cast<std::int32_t>(days_from_civil(year, month, day)));
  }

  // Strict YYYY-MM-DD. Rejects impossible dates (e.g. 2021-02-29).
  static std::optional<Date> parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto number = [&](std::size_t pos, std::size_t len, int& out) {
      for (std::size_t i = pos; i < pos + len; ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
      }
      auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
      return ec == std::errc{} && p == text.data() + pos + len;
    };
    int y = 0, m = 0, d = 0;
    if (!number(0, 4, y) || !number(5, 2, m) || !number(8, 2, d)) return std::nullopt;
    if (m < 1 || m > 12) return std::nullopt;
    if (d < 1 || static_cast<unsigned>(d) > days_in_month(y, static_cast<unsigned>(m))) {
      return std::nullopt;
    }
    return from_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
  }

  constexpr std::int32_t days_since_epoch() const { return days_; }

  constexpr Date plus_days(std::int32_t n) const { return from_days(days_ + n); }

  constexpr std::tuple<std::int64_t, unsigned, unsigned> to_civil() const {
    return civil_from_days(days_);
  }

  std::string to_string() const {
    auto [y, m, d] = to_civil();
    char buf[11];
    auto two = [](char* p, unsigned v) {
      p[0] = static_cast<char>('0' + v / 10);
      p[1] = static_cast<char>('0' + v % 10);
    };
    unsigned year = static_cast<unsigned>(y);
    buf[0] = static_cast<char>('0' + (year / 1000) % 10);
    buf[1] = static_cast<char>('0' + (year / 100) % 10);
    buf[2] = static_cast<char>('0' + (year / 10) % 10);
    buf[3] = static_cast<char>('0' + year % 10);
    buf[4] = '-';
    two(buf + 5, m);
    buf[7] = '-';
    two(buf + 8, d);
    return std::string(buf, 10);
  }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::int32_t days_ = 0;
};

// Whole days from a to b (positive when b is later).
constexpr std::int32_t days_between(Date a, Date b) {
  return b.days_since_epoch() - a.days_since_epoch();
}

}  // namespace exposome
