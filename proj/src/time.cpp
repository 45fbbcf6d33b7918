#include "geotrips/time.hpp"

#include <cstdlib>

#include "absl/time/civil_time.h"
#include "geotrips/error.hpp"

namespace geotrips {

namespace {

absl::string_view to_absl(std::string_view s) { return absl::string_view(s.data(), s.size()); }

absl::Time to_absl(Instant t) { return absl::FromUnixSeconds(to_unix_seconds(t)); }

Instant from_absl(absl::Time t) {
  return from_unix_seconds(absl::ToUnixSeconds(t));  // rounds toward -inf
}

}  // namespace

TimeZone::TimeZone() : zone_(absl::UTCTimeZone()), name_("UTC") {}

TimeZone::TimeZone(absl::TimeZone zone, std::string name)
    : zone_(std::move(zone)), name_(std::move(name)) {}

TimeZone TimeZone::load(const std::string& name) {
  absl::TimeZone zone;
  if (!absl::LoadTimeZone(name, &zone)) {
    throw ConfigError("unknown time zone '" + name + "'");
  }
  return TimeZone(zone, name);
}

TimeZone TimeZone::from_environment() {
  const char* env = std::getenv("GEOTRIPS_TZ");
  if (env == nullptr || *env == '\0') return TimeZone();
  return load(env);
}

int TimeZone::local_hour(Instant t) const {
  return absl::ToCivilHour(to_absl(t), zone_).hour();
}

bool TimeZone::is_weekend(Instant t) const {
  const auto day = absl::GetWeekday(absl::ToCivilDay(to_absl(t), zone_));
  return day == absl::Weekday::saturday || day == absl::Weekday::sunday;
}

std::optional<Instant> parse_iso8601(std::string_view text) {
  absl::Time t;
  std::string err;
  if (!absl::ParseTime(absl::RFC3339_full, to_absl(text), &t, &err)) return std::nullopt;
  return from_absl(t);
}

std::optional<Instant> parse_legacy_timestamp(std::string_view text, const TimeZone& tz) {
  absl::Time t;
  std::string err;
  if (absl::ParseTime("%m/%d/%Y %H:%M:%S", to_absl(text), tz.absl_zone(), &t, &err) ||
      absl::ParseTime("%m/%d/%Y %H:%M", to_absl(text), tz.absl_zone(), &t, &err)) {
    return from_absl(t);
  }
  return std::nullopt;
}

std::string format_iso8601(Instant t) {
  return absl::FormatTime("%Y-%m-%dT%H:%M:%SZ", to_absl(t), absl::UTCTimeZone());
}

}  // namespace geotrips
