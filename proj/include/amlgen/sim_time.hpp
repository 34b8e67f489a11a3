#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace amlgen {

// Minutes since 1970-01-01 00:00 (UTC, no leap seconds).
using SimTime = std::int64_t;

constexpr SimTime kMinutesPerDay = 24 * 60;

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  friend bool operator==(const CivilDate&, const CivilDate&) = default;
};

std::int64_t days_from_civil(const CivilDate& date);
CivilDate civil_from_days(std::int64_t days);
unsigned days_in_month(int year, unsigned month);

SimTime to_sim_time(const CivilDate& date, int hour = 0, int minute = 0);
CivilDate date_of(SimTime t);

// "YYYY/MM/DD HH:MM", the dataset timestamp shape.
std::string format_timestamp(SimTime t);
void append_timestamp(std::string& out, SimTime t);
std::optional<SimTime> parse_timestamp(std::string_view text);

// ISO "YYYY-MM-DD", used in configuration files.
std::string format_iso_date(const CivilDate& date);
std::optional<CivilDate> parse_iso_date(std::string_view text);

}  // namespace amlgen
