#include "geotrips/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace geotrips {

double RunReport::average_displacements_per_traveler() const {
  return travelers == 0 ? 0.0 : static_cast<double>(displacements_total) / static_cast<double>(travelers);
}

std::string RunReport::average_display() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", average_displacements_per_traveler());
  return buf;
}

std::vector<std::string> RunReport::consistency_violations() const {
  std::vector<std::string> out;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) out.emplace_back(what);
  };
  expect(lines_read == records_parsed + lines_rejected, "lines_read != records_parsed + lines_rejected");
  expect(records_parsed == duplicates_removed + records_in_timelines,
         "records_parsed != duplicates_removed + records_in_timelines");
  expect(users_in == users_retained + users_dropped, "users_in != users_retained + users_dropped");
  expect(records_in_timelines == records_of_retained_users + records_of_dropped_users,
         "records_in_timelines != retained + dropped user records");
  expect(records_of_retained_users == records_removed_by_speed + records_after_speed_filter,
         "records_of_retained_users != removed_by_speed + after_speed_filter");
  expect(displacements_total ==
             displacements_inter_zone + displacements_intra_zone + displacements_external,
         "displacements_total != inter + intra + external");
  expect(travelers <= users_retained, "travelers > users_retained");
  expect(displacements_total + users_retained <= records_after_speed_filter,
         "more displacements than consecutive record pairs");
  expect((travelers == 0) == (displacements_total == 0), "travelers and displacements disagree on zero");
  return out;
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["lines_read"] = lines_read;
  j["records_parsed"] = records_parsed;
  j["lines_rejected"] = lines_rejected;
  j["duplicates_removed"] = duplicates_removed;
  j["records_in_timelines"] = records_in_timelines;
  j["users_in"] = users_in;
  j["users_retained"] = users_retained;
  j["users_dropped"] = users_dropped;
  j["records_of_retained_users"] = records_of_retained_users;
  j["records_of_dropped_users"] = records_of_dropped_users;
  j["records_removed_by_speed"] = records_removed_by_speed;
  j["records_after_speed_filter"] = records_after_speed_filter;
  j["displacements_total"] = displacements_total;
  j["displacements_inter_zone"] = displacements_inter_zone;
  j["displacements_intra_zone"] = displacements_intra_zone;
  j["displacements_external"] = displacements_external;
  j["travelers"] = travelers;
  j["average_displacements_per_traveler"] = average_displacements_per_traveler();
  j["average_displacements_per_traveler_display"] = average_display();
  return j.dump(2) + "\n";
}

std::string RunReport::to_table() const {
  std::ostringstream os;
  auto row = [&](const char* name, auto value) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "  %-34s %s\n", name, std::to_string(value).c_str());
    os << buf;
  };
  os << "Run report\n";
  row("lines read", lines_read);
  row("records parsed", records_parsed);
  row("lines rejected", lines_rejected);
  row("duplicates removed", duplicates_removed);
  row("users in", users_in);
  row("users retained", users_retained);
  row("users dropped", users_dropped);
  row("records removed by speed filter", records_removed_by_speed);
  row("records after speed filter", records_after_speed_filter);
  row("displacements (total)", displacements_total);
  row("displacements (inter-zone)", displacements_inter_zone);
  row("displacements (intra-zone)", displacements_intra_zone);
  row("displacements (touching EXTERNAL)", displacements_external);
  row("travelers", travelers);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "  %-34s %s\n", "average displacements/traveler",
                average_display().c_str());
  os << buf;
  if (!stage_seconds.empty()) {
    os << "Stage timings (s)\n";
    for (const auto& [stage, secs] : stage_seconds) {
      std::snprintf(buf, sizeof(buf), "  %-34s %.3f\n", stage.c_str(), secs);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace geotrips
