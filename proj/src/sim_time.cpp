#include "amlgen/sim_time.hpp"

#include <charconv>

namespace amlgen {

// Civil-calendar conversions after H. Hinnant's public-domain algorithms.
std::int64_t days_from_civil(const CivilDate& date) {
  const std::int64_t y = static_cast<std::int64_t>(date.year) - (date.month <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t m = date.month;
  const std::int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + date.day - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const unsigned d = static_cast<unsigned>(doy - (153 * mp + 2) / 5 + 1);
  const unsigned m = static_cast<unsigned>(mp < 10 ? mp + 3 : mp - 9);
  const std::int64_t y = yoe + era * 400 + (m <= 2 ? 1 : 0);
  return {static_cast<int>(y), m, d};
}

unsigned days_in_month(int year, unsigned month) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[month - 1];
}

SimTime to_sim_time(const CivilDate& date, int hour, int minute) {
  return days_from_civil(date) * kMinutesPerDay + hour * 60 + minute;
}

CivilDate date_of(SimTime t) {
  std::int64_t days = t / kMinutesPerDay;
  if (t % kMinutesPerDay < 0) --days;
  return civil_from_days(days);
}

namespace {

void append_padded(std::string& out, unsigned value, int width) {
  char buf[8];
  for (int i = width - 1; i >= 0; --i) {
    buf[i] = static_cast<char>('0' + value % 10);
    value /= 10;
  }
  out.append(buf, width);
}

bool read_uint(std::string_view text, std::size_t pos, std::size_t len, int& value) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  auto [p, ec] = std::from_chars(first, first + len, value);
  return ec == std::errc{} && p == first + len;
}

}  // namespace

void append_timestamp(std::string& out, SimTime t) {
  const CivilDate d = date_of(t);
  std::int64_t minute_of_day = t % kMinutesPerDay;
  if (minute_of_day < 0) minute_of_day += kMinutesPerDay;
  append_padded(out, static_cast<unsigned>(d.year), 4);
  out.push_back('/');
  append_padded(out, d.month, 2);
  out.push_back('/');
  append_padded(out, d.day, 2);
  out.push_back(' ');
  append_padded(out, static_cast<unsigned>(minute_of_day / 60), 2);
  out.push_back(':');
  append_padded(out, static_cast<unsigned>(minute_of_day % 60), 2);
}

std::string format_timestamp(SimTime t) {
  std::string out;
  append_timestamp(out, t);
  return out;
}

std::optional<SimTime> parse_timestamp(std::string_view text) {
  if (text.size() != 16 || text[4] != '/' || text[7] != '/' || text[10] != ' ' || text[13] != ':') {
    return std::nullopt;
  }
  int y, mo, d, h, mi;
  if (!read_uint(text, 0, 4, y) || !read_uint(text, 5, 2, mo) || !read_uint(text, 8, 2, d) ||
      !read_uint(text, 11, 2, h) || !read_uint(text, 14, 2, mi)) {
    return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > static_cast<int>(days_in_month(y, mo)) || h > 23 || mi > 59) {
    return std::nullopt;
  }
  return to_sim_time({y, static_cast<unsigned>(mo), static_cast<unsigned>(d)}, h, mi);
}

std::string format_iso_date(const CivilDate& date) {
  std::string out;
  append_padded(out, static_cast<unsigned>(date.year), 4);
  out.push_back('-');
  append_padded(out, date.month, 2);
  out.push_back('-');
  append_padded(out, date.day, 2);
  return out;
}

std::optional<CivilDate> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y, mo, d;
  if (!read_uint(text, 0, 4, y) || !read_uint(text, 5, 2, mo) || !read_uint(text, 8, 2, d)) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > static_cast<int>(days_in_month(y, mo))) return std::nullopt;
  return CivilDate{y, static_cast<unsigned>(mo), static_cast<unsigned>(d)};
}

}  // namespace amlgen
