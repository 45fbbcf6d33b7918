#include "geotrips/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "geotrips/csv.hpp"
#include "geotrips/error.hpp"
#include "geotrips/parallel.hpp"
#include "json.hpp"

namespace geotrips {

namespace {

using Json = nlohmann::json;

struct LineOutcome {
  std::optional<TweetRecord> record;
  std::string reason;
};

LineOutcome reject(std::string reason) { return {std::nullopt, std::move(reason)}; }

LineOutcome build_record(std::string user_id, std::optional<double> lat, std::optional<double> lon,
                         std::string_view timestamp, std::string text,
                         const ParseOptions& options) {
  if (user_id.empty()) return reject("empty user_id");
  if (!lat || !std::isfinite(*lat)) return reject("latitude not a number");
  if (!lon || !std::isfinite(*lon)) return reject("longitude not a number");
  if (*lat < -90.0 || *lat > 90.0) return reject("latitude out of range");
  if (*lon < -180.0 || *lon > 180.0) return reject("longitude out of range");
  timestamp = csv::trim(timestamp);
  auto when = parse_iso8601(timestamp);
  if (!when && options.legacy_timestamps) when = parse_legacy_timestamp(timestamp, options.timezone);
  if (!when) return reject("invalid timestamp");
  TweetRecord rec;
  rec.user_id = std::move(user_id);
  rec.position = make_point(*lat, *lon);
  rec.timestamp = *when;
  rec.text = std::move(text);
  return {std::move(rec), {}};
}

LineOutcome parse_csv_line(std::string_view line, const ParseOptions& options) {
  auto fields = csv::split_line(line);
  if (!fields) return reject("unterminated quote");
  if (fields->size() < 4 || fields->size() > 5) return reject("expected 4 or 5 fields");
  auto& f = *fields;
  std::string text = f.size() == 5 ? std::move(f[4]) : std::string();
  return build_record(std::string(csv::trim(f[0])), csv::parse_double(f[1]), csv::parse_double(f[2]),
                      f[3], std::move(text), options);
}

std::optional<double> json_number(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (it->is_number()) return it->get<double>();
  if (it->is_string()) return csv::parse_double(it->get_ref<const std::string&>());
  return std::nullopt;
}

LineOutcome parse_jsonl_line(std::string_view line, const ParseOptions& options) {
  Json obj = Json::parse(line.begin(), line.end(), nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) return reject("invalid JSON object");
  auto uid = obj.find("user_id");
  if (uid == obj.end()) return reject("missing user_id");
  std::string user_id;
  if (uid->is_string()) {
    user_id = uid->get<std::string>();
  } else if (uid->is_number_integer()) {
    user_id = std::to_string(uid->get<long long>());
  } else {
    return reject("user_id must be a string or integer");
  }
  auto ts = obj.find("timestamp");
  if (ts == obj.end() || !ts->is_string()) return reject("missing timestamp");
  std::string text;
  if (auto t = obj.find("text"); t != obj.end() && t->is_string()) text = t->get<std::string>();
  return build_record(std::move(user_id), json_number(obj, "lat"), json_number(obj, "lon"),
                      ts->get_ref<const std::string&>(), std::move(text), options);
}

void check_csv_header(std::string_view header) {
  auto fields = csv::split_line(header);
  static const char* expected[] = {"user_id", "lat", "lon", "timestamp"};
  bool ok = fields && fields->size() >= 4 && fields->size() <= 5;
  for (std::size_t i = 0; ok && i < 4; ++i) ok = csv::trim((*fields)[i]) == expected[i];
  if (ok && fields->size() == 5) ok = csv::trim((*fields)[4]) == "text";
  if (!ok) {
    throw FormatMismatchError("CSV header must be 'user_id,lat,lon,timestamp,text', got '" +
                              std::string(header) + "'");
  }
}

bool is_blank(std::string_view line) { return csv::trim(line).empty(); }

}  // namespace

RecordFormat parse_record_format(std::string_view name) {
  if (name == "csv") return RecordFormat::csv;
  if (name == "jsonl" || name == "json") return RecordFormat::jsonl;
  throw ConfigError("unknown record format '" + std::string(name) + "' (expected csv or jsonl)");
}

ParseResult parse_records(std::string_view source, const ParseOptions& options) {
  auto lines = csv::split_lines(source);
  std::size_t first_data = 0;
  if (options.format == RecordFormat::csv) {
    while (first_data < lines.size() && is_blank(lines[first_data])) ++first_data;
    if (first_data == lines.size()) return {};
    check_csv_header(lines[first_data]);
    ++first_data;
  }

  const std::size_t n = lines.size() - std::min(first_data, lines.size());
  std::vector<LineOutcome> outcomes(n);
  std::vector<char> blank(n, 0);
  parallel_for(n, options.workers, [&](std::size_t i) {
    const auto line = lines[first_data + i];
    if (is_blank(line)) {
      blank[i] = 1;
      return;
    }
    outcomes[i] = options.format == RecordFormat::csv ? parse_csv_line(line, options)
                                                      : parse_jsonl_line(line, options);
  });

  ParseResult result;
  for (std::size_t i = 0; i < n; ++i) {
    if (blank[i]) continue;
    ++result.lines_read;
    if (outcomes[i].record) {
      result.records.push_back(std::move(*outcomes[i].record));
    } else {
      result.rejected.push_back({first_data + i + 1, std::move(outcomes[i].reason)});
    }
  }
  if (result.rejected.size() * 2 > result.lines_read) {
    throw FormatMismatchError("format mismatch: " + std::to_string(result.rejected.size()) + " of " +
                              std::to_string(result.lines_read) + " lines rejected (first: line " +
                              std::to_string(result.rejected.front().line_number) + ", " +
                              result.rejected.front().reason + ")");
  }
  return result;
}

ParseResult parse_records(std::istream& source, const ParseOptions& options) {
  std::string buffer{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (source.bad()) throw IoError("failed reading record stream");
  return parse_records(std::string_view(buffer), options);
}

ParseResult parse_records_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + path.string() + "'");
  return parse_records(in, options);
}

void write_records_csv(std::ostream& out, const std::vector<TweetRecord>& records) {
  out << "user_id,lat,lon,timestamp,text\n";
  for (const auto& r : records) {
    out << csv::quote(r.user_id) << ',' << csv::format_double(r.lat()) << ','
        << csv::format_double(r.lon()) << ',' << format_iso8601(r.timestamp) << ','
        << csv::quote(r.text) << '\n';
  }
}

void write_records_jsonl(std::ostream& out, const std::vector<TweetRecord>& records) {
  for (const auto& r : records) {
    Json obj;
    obj["user_id"] = r.user_id;
    obj["lat"] = r.lat();
    obj["lon"] = r.lon();
    obj["timestamp"] = format_iso8601(r.timestamp);
    obj["text"] = r.text;
    out << obj.dump() << '\n';
  }
}

void write_rejects_csv(std::ostream& out, const std::vector<RejectedLine>& rejected) {
  out << "line_number,reason\n";
  for (const auto& r : rejected) out << r.line_number << ',' << csv::quote(r.reason) << '\n';
}

TimelineMap build_timelines(std::vector<TweetRecord> records, unsigned workers) {
  TimelineMap timelines;
  for (auto& rec : records) {
    auto& tl = timelines[rec.user_id];
    if (tl.user_id.empty()) tl.user_id = rec.user_id;
    tl.records.push_back(std::move(rec));
  }
  std::vector<UserTimeline*> users;
  users.reserve(timelines.size());
  for (auto& [id, tl] : timelines) users.push_back(&tl);
  parallel_for(users.size(), workers, [&](std::size_t i) {
    auto& recs = users[i]->records;
    std::stable_sort(recs.begin(), recs.end(),
                     [](const TweetRecord& a, const TweetRecord& b) { return a.timestamp < b.timestamp; });
  });
  return timelines;
}

std::size_t remove_duplicate_records(TimelineMap& timelines) {
  std::size_t removed = 0;
  for (auto& [id, tl] : timelines) {
    auto& recs = tl.records;
    std::vector<TweetRecord> kept;
    kept.reserve(recs.size());
    std::size_t run_start = 0;
    for (auto& rec : recs) {
      if (!kept.empty() && kept.back().timestamp != rec.timestamp) run_start = kept.size();
      const bool duplicate =
          std::any_of(kept.begin() + static_cast<std::ptrdiff_t>(run_start), kept.end(),
                      [&](const TweetRecord& k) { return k.position == rec.position; });
      if (duplicate) {
        ++removed;
      } else {
        kept.push_back(std::move(rec));
      }
    }
    recs = std::move(kept);
  }
  return removed;
}

std::size_t total_records(const TimelineMap& timelines) {
  std::size_t n = 0;
  for (const auto& [id, tl] : timelines) n += tl.records.size();
  return n;
}

}  // namespace geotrips
