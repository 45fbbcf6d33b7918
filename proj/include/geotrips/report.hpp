#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace geotrips {

/// Stage-by-stage counts of one extraction run.
struct RunReport {
  // ingest
  std::size_t lines_read = 0;
  std::size_t records_parsed = 0;
  std::size_t lines_rejected = 0;
  std::size_t duplicates_removed = 0;
  std::size_t records_in_timelines = 0;

  // activity filter
  std::size_t users_in = 0;
  std::size_t users_retained = 0;
  std::size_t users_dropped = 0;
  std::size_t records_of_retained_users = 0;
  std::size_t records_of_dropped_users = 0;

  // speed filter
  std::size_t records_removed_by_speed = 0;
  std::size_t records_after_speed_filter = 0;

  // displacements
  std::size_t displacements_total = 0;
  std::size_t displacements_inter_zone = 0;
  std::size_t displacements_intra_zone = 0;
  std::size_t displacements_external = 0;
  std::size_t travelers = 0;

  /// Wall-clock seconds per stage, in execution order. Not part of the JSON form,
  /// which must not depend on timing.
  std::vector<std::pair<std::string, double>> stage_seconds;

  /// total / travelers, or 0 when there are no travelers.
  double average_displacements_per_traveler() const;

  /// Average rounded to one decimal, e.g. "14.5".
  std::string average_display() const;

  /// Empty when every arithmetic identity between the counters holds.
  std::vector<std::string> consistency_violations() const;

  std::string to_json() const;

  /// Human-readable table including stage timings.
  std::string to_table() const;
};

}  // namespace geotrips
