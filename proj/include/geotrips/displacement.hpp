#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "geotrips/ingest.hpp"
#include "geotrips/report.hpp"
#include "geotrips/zoning.hpp"

namespace geotrips {

inline constexpr double kMetersPerSecondPerMph = 0.44704;

/// Activity threshold, speed bound, pairing window and jitter floor.
struct FilterConfig {
  std::size_t min_tweets = 100;
  double max_speed = 100.0 * kMetersPerSecondPerMph;  // m/s
  Seconds time_window{7200};
  double min_displacement_distance = 100.0;  // m

  /// Throws ConfigError unless every field is strictly positive.
  void validate() const;
};

struct Displacement {
  std::string user_id;
  GeoPoint origin = GeoPoint::Zero();
  GeoPoint destination = GeoPoint::Zero();
  Instant start_time{};
  Instant end_time{};
  double distance = 0.0;  // m
  ZoneLabel origin_zone;
  ZoneLabel destination_zone;
  Instant crossing_time_estimate{};

  Seconds duration() const { return end_time - start_time; }
  bool is_inter_zone() const { return origin_zone != destination_zone; }
  bool touches_external() const { return origin_zone.is_external() || destination_zone.is_external(); }
};

/// Keeps users with at least `cfg.min_tweets` records.
TimelineMap filter_active_users(const TimelineMap& timelines, const FilterConfig& cfg,
                                RunReport* report = nullptr);

struct SpeedFilterResult {
  UserTimeline timeline;
  std::vector<TweetRecord> removed;
};

/// Single forward scan: a record implying a speed above cfg.max_speed from the last
/// kept record is dropped. Equal timestamps count as infinite speed once the points
/// are more than cfg.min_displacement_distance apart.
SpeedFilterResult remove_speed_violations(const UserTimeline& tl, const FilterConfig& cfg);

/// Consecutive pairs with 0 < dt <= window and distance >= min_displacement_distance.
/// Zones are left EXTERNAL and the crossing estimate at start_time.
std::vector<Displacement> extract_displacements(const UserTimeline& tl, const FilterConfig& cfg);

/// Labels both endpoints; the crossing estimate is the interval midpoint for an
/// inter-zone displacement, else start_time.
Displacement label_displacement(Displacement d, const ZoneSet& zones);

struct ExtractionResult {
  std::vector<Displacement> displacements;  // sorted by (user_id, start_time)
  std::vector<TweetRecord> speed_removals;  // sorted by user_id, then time
  RunReport report;
  /// Per retained user: records before the speed filter and displacements emitted.
  struct UserCounts {
    std::string user_id;
    std::size_t tweet_count = 0;
    std::size_t displacement_count = 0;
  };
  std::vector<UserCounts> users;
};

/// filter_active_users -> remove_speed_violations -> extract_displacements ->
/// label_displacement, parallel over users. Output is independent of `workers`.
/// Ingest counters in the report are left for the caller to fill.
ExtractionResult run_extraction(const TimelineMap& timelines, const ZoneSet& zones,
                                const FilterConfig& cfg, unsigned workers = 1);

/// CSV: user_id,origin_lat,origin_lon,dest_lat,dest_lon,start_time,end_time,
/// duration_s,distance_m,origin_zone,dest_zone,crossing_time
void write_displacements_csv(std::ostream& out, const std::vector<Displacement>& displacements);

/// Reads the CSV written by write_displacements_csv. Throws FormatMismatchError on a
/// malformed row (these files are machine-written).
std::vector<Displacement> read_displacements_csv(std::istream& in);

}  // namespace geotrips
