#include "geotrips/displacement.hpp"

#include <chrono>
#include <istream>
#include <ostream>
#include <string>

#include "geotrips/csv.hpp"
#include "geotrips/error.hpp"
#include "geotrips/parallel.hpp"

namespace geotrips {

void FilterConfig::validate() const {
  if (min_tweets == 0) throw ConfigError("min_tweets must be positive");
  if (!(max_speed > 0.0) || !std::isfinite(max_speed)) throw ConfigError("max_speed must be positive");
  if (time_window.count() <= 0) throw ConfigError("time_window must be positive");
  if (!(min_displacement_distance > 0.0) || !std::isfinite(min_displacement_distance)) {
    throw ConfigError("min_displacement_distance must be positive");
  }
}

TimelineMap filter_active_users(const TimelineMap& timelines, const FilterConfig& cfg, RunReport* report) {
  TimelineMap kept;
  std::size_t dropped = 0, kept_records = 0, dropped_records = 0;
  for (const auto& [id, tl] : timelines) {
    if (tl.records.size() >= cfg.min_tweets) {
      kept.emplace(id, tl);
      kept_records += tl.records.size();
    } else {
      ++dropped;
      dropped_records += tl.records.size();
    }
  }
  if (report != nullptr) {
    report->users_in = timelines.size();
    report->users_retained = kept.size();
    report->users_dropped = dropped;
    report->records_of_retained_users = kept_records;
    report->records_of_dropped_users = dropped_records;
  }
  return kept;
}

namespace {

bool violates_speed(const TweetRecord& from, const TweetRecord& to, const FilterConfig& cfg) {
  const double dist = haversine_distance(from.position, to.position);
  const auto dt = (to.timestamp - from.timestamp).count();
  if (dt <= 0) return dist > cfg.min_displacement_distance;
  return dist / static_cast<double>(dt) > cfg.max_speed;
}

}  // namespace

SpeedFilterResult remove_speed_violations(const UserTimeline& tl, const FilterConfig& cfg) {
  SpeedFilterResult out;
  out.timeline.user_id = tl.user_id;
  out.timeline.records.reserve(tl.records.size());
  for (const auto& rec : tl.records) {
    if (!out.timeline.records.empty() && violates_speed(out.timeline.records.back(), rec, cfg)) {
      out.removed.push_back(rec);
    } else {
      out.timeline.records.push_back(rec);
    }
  }
  return out;
}

std::vector<Displacement> extract_displacements(const UserTimeline& tl, const FilterConfig& cfg) {
  std::vector<Displacement> out;
  const auto& recs = tl.records;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    const auto& a = recs[i - 1];
    const auto& b = recs[i];
    const auto dt = b.timestamp - a.timestamp;
    if (dt <= Seconds{0} || dt > cfg.time_window) continue;
    const double dist = haversine_distance(a.position, b.position);
    if (dist < cfg.min_displacement_distance) continue;
    Displacement d;
    d.user_id = tl.user_id;
    d.origin = a.position;
    d.destination = b.position;
    d.start_time = a.timestamp;
    d.end_time = b.timestamp;
    d.distance = dist;
    d.crossing_time_estimate = a.timestamp;
    out.push_back(std::move(d));
  }
  return out;
}

Displacement label_displacement(Displacement d, const ZoneSet& zones) {
  d.origin_zone = zones.label_point(d.origin);
  d.destination_zone = zones.label_point(d.destination);
  d.crossing_time_estimate =
      d.origin_zone != d.destination_zone ? d.start_time + (d.end_time - d.start_time) / 2 : d.start_time;
  return d;
}

ExtractionResult run_extraction(const TimelineMap& timelines, const ZoneSet& zones, const FilterConfig& cfg,
                                unsigned workers) {
  cfg.validate();
  using Clock = std::chrono::steady_clock;
  ExtractionResult result;
  auto& report = result.report;

  auto t0 = Clock::now();
  const TimelineMap active = filter_active_users(timelines, cfg, &report);
  report.records_in_timelines = total_records(timelines);
  auto t1 = Clock::now();
  report.stage_seconds.emplace_back("activity filter", std::chrono::duration<double>(t1 - t0).count());

  std::vector<const UserTimeline*> users;
  users.reserve(active.size());
  for (const auto& [id, tl] : active) users.push_back(&tl);

  struct PerUser {
    std::vector<Displacement> displacements;
    std::vector<TweetRecord> removed;
    std::size_t kept_records = 0;
  };
  std::vector<PerUser> per_user(users.size());
  parallel_for(users.size(), workers, [&](std::size_t i) {
    auto filtered = remove_speed_violations(*users[i], cfg);
    auto displacements = extract_displacements(filtered.timeline, cfg);
    for (auto& d : displacements) d = label_displacement(std::move(d), zones);
    per_user[i] = {std::move(displacements), std::move(filtered.removed), filtered.timeline.records.size()};
  });
  auto t2 = Clock::now();
  report.stage_seconds.emplace_back("speed filter + pairing + labeling",
                                    std::chrono::duration<double>(t2 - t1).count());

  for (std::size_t i = 0; i < users.size(); ++i) {
    auto& pu = per_user[i];
    report.records_removed_by_speed += pu.removed.size();
    report.records_after_speed_filter += pu.kept_records;
    result.users.push_back({users[i]->user_id, users[i]->records.size(), pu.displacements.size()});
    if (!pu.displacements.empty()) ++report.travelers;
    for (auto& d : pu.displacements) {
      if (d.touches_external()) {
        ++report.displacements_external;
      } else if (d.origin_zone == d.destination_zone) {
        ++report.displacements_intra_zone;
      } else {
        ++report.displacements_inter_zone;
      }
      result.displacements.push_back(std::move(d));
    }
    for (auto& r : pu.removed) result.speed_removals.push_back(std::move(r));
  }
  report.displacements_total = result.displacements.size();
  return result;
}

void write_displacements_csv(std::ostream& out, const std::vector<Displacement>& displacements) {
  out << "user_id,origin_lat,origin_lon,dest_lat,dest_lon,start_time,end_time,duration_s,distance_m,"
         "origin_zone,dest_zone,crossing_time\n";
  for (const auto& d : displacements) {
    out << csv::quote(d.user_id) << ',' << csv::format_double(d.origin(0)) << ','
        << csv::format_double(d.origin(1)) << ',' << csv::format_double(d.destination(0)) << ','
        << csv::format_double(d.destination(1)) << ',' << format_iso8601(d.start_time) << ','
        << format_iso8601(d.end_time) << ',' << d.duration().count() << ','
        << csv::format_double(d.distance) << ',' << csv::quote(d.origin_zone.id()) << ','
        << csv::quote(d.destination_zone.id()) << ',' << format_iso8601(d.crossing_time_estimate) << '\n';
  }
}

std::vector<Displacement> read_displacements_csv(std::istream& in) {
  std::vector<Displacement> out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw FormatMismatchError("displacement CSV line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (csv::trim(line).empty()) continue;
    if (line_no == 1) {
      if (line.rfind("user_id,origin_lat", 0) != 0) fail("missing displacement header");
      continue;
    }
    auto fields = csv::split_line(line);
    if (!fields || fields->size() != 12) fail("expected 12 fields");
    const auto& f = *fields;
    auto num = [&](std::size_t i) {
      auto v = csv::parse_double(f[i]);
      if (!v) fail("bad number in column " + std::to_string(i + 1));
      return *v;
    };
    auto when = [&](std::size_t i) {
      auto t = parse_iso8601(f[i]);
      if (!t) fail("bad timestamp in column " + std::to_string(i + 1));
      return *t;
    };
    Displacement d;
    d.user_id = f[0];
    d.origin = make_point(num(1), num(2));
    d.destination = make_point(num(3), num(4));
    d.start_time = when(5);
    d.end_time = when(6);
    d.distance = num(8);
    d.origin_zone = ZoneLabel(f[9]);
    d.destination_zone = ZoneLabel(f[10]);
    d.crossing_time_estimate = when(11);
    if (d.end_time <= d.start_time) fail("end_time not after start_time");
    out.push_back(std::move(d));
  }
  if (line_no == 0) throw FormatMismatchError("displacement CSV is empty (no header)");
  return out;
}

}  // namespace geotrips
