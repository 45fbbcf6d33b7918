#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "geotrips/geometry.hpp"
#include "geotrips/time.hpp"

namespace geotrips {

/// One geotagged post.
struct TweetRecord {
  std::string user_id;
  GeoPoint position = GeoPoint::Zero();
  Instant timestamp{};
  std::string text;

  double lat() const { return position(0); }
  double lon() const { return position(1); }

  friend bool operator==(const TweetRecord& a, const TweetRecord& b) {
    return a.user_id == b.user_id && a.position == b.position && a.timestamp == b.timestamp &&
           a.text == b.text;
  }
};

struct RejectedLine {
  std::size_t line_number = 0;  // 1-based physical line in the source
  std::string reason;
};

enum class RecordFormat { csv, jsonl };

RecordFormat parse_record_format(std::string_view name);

struct ParseOptions {
  RecordFormat format = RecordFormat::csv;
  /// Also accept "8/2/2014 21:58" timestamps, read as civil time in `timezone`.
  bool legacy_timestamps = false;
  TimeZone timezone;
  unsigned workers = 1;
};

struct ParseResult {
  std::vector<TweetRecord> records;
  std::vector<RejectedLine> rejected;
  /// Non-blank data lines seen (header excluded); always records + rejected.
  std::size_t lines_read = 0;
};

/// Parses CSV (`user_id,lat,lon,timestamp,text`, header required) or JSON-lines.
/// Malformed lines are collected, never fatal, unless more than half of all data
/// lines are rejected (FormatMismatchError).
ParseResult parse_records(std::string_view source, const ParseOptions& options);
ParseResult parse_records(std::istream& source, const ParseOptions& options);

/// Reads and parses a file; IoError when it cannot be read.
ParseResult parse_records_file(const std::filesystem::path& path, const ParseOptions& options);

/// Canonical CSV (with header) that parse_records reads back to identical records.
void write_records_csv(std::ostream& out, const std::vector<TweetRecord>& records);
void write_records_jsonl(std::ostream& out, const std::vector<TweetRecord>& records);

void write_rejects_csv(std::ostream& out, const std::vector<RejectedLine>& rejected);

struct UserTimeline {
  std::string user_id;
  std::vector<TweetRecord> records;  // ascending by timestamp, stable on ties
};

using TimelineMap = std::map<std::string, UserTimeline>;

/// Groups records by user and stably sorts each timeline by timestamp.
TimelineMap build_timelines(std::vector<TweetRecord> records, unsigned workers = 1);

/// Drops later copies of records with identical (timestamp, lat, lon) within each
/// timeline. Returns the number of records removed.
std::size_t remove_duplicate_records(TimelineMap& timelines);

std::size_t total_records(const TimelineMap& timelines);

}  // namespace geotrips
