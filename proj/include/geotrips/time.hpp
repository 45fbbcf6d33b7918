#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "absl/time/time.h"

namespace geotrips {

/// Absolute instant at one-second resolution (UTC based).
using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

inline Instant from_unix_seconds(std::int64_t s) { return Instant{Seconds{s}}; }
inline std::int64_t to_unix_seconds(Instant t) { return t.time_since_epoch().count(); }

/// Named IANA time zone, used for local hour-of-day and weekday/weekend decisions.
class TimeZone {
 public:
  /// UTC.
  TimeZone();

  /// Throws ConfigError when the zone is unknown to the system database.
  static TimeZone load(const std::string& name);

  /// `GEOTRIPS_TZ` when set, otherwise UTC.
  static TimeZone from_environment();

  const std::string& name() const { return name_; }
  const absl::TimeZone& absl_zone() const { return zone_; }

  int local_hour(Instant t) const;
  bool is_weekend(Instant t) const;

 private:
  TimeZone(absl::TimeZone zone, std::string name);

  absl::TimeZone zone_;
  std::string name_;
};

/// ISO 8601 / RFC 3339 timestamp with explicit offset ("2014-08-02T21:58:00Z",
/// "2014-08-02T17:58:00-04:00"). Fractional seconds are truncated.
std::optional<Instant> parse_iso8601(std::string_view text);

/// Display format "8/2/2014 21:58" (optionally with ":SS"), read as civil time in `tz`.
std::optional<Instant> parse_legacy_timestamp(std::string_view text, const TimeZone& tz);

/// Canonical UTC rendering, e.g. "2014-08-02T21:58:00Z".
std::string format_iso8601(Instant t);

}  // namespace geotrips
