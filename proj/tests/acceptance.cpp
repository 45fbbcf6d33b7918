// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "geotrips/analytics.hpp"
#include "geotrips/app.hpp"
#include "geotrips/displacement.hpp"
#include "geotrips/synthgen.hpp"
#include "test_support.hpp"

using namespace geotrips;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome ac1_pip() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::size_t checked = 0, mismatches = 0;
  for (int k = 0; k < 3; ++k) {
    const auto ring = testing::random_star_polygon(rng, 50, 40.0 + k, -74.0 + k, 0.05, 0.3);
    ZonePolygon poly;
    poly.outer = ring;
    Zone z;
    z.zone_id = z.name = "p" + std::to_string(k);
    z.polygons.push_back(poly);
    const ZoneSet zones({z});
    const auto box = bbox(poly);
    std::uniform_real_distribution<double> lat(box.min_lat - 0.05, box.max_lat + 0.05);
    std::uniform_real_distribution<double> lon(box.min_lon - 0.05, box.max_lon + 0.05);
    for (int i = 0; i < 10000; ++i) {
      const double la = lat(rng), lo = lon(rng);
      if (testing::edge_distance_deg(ring, la, lo) < 1e-9) continue;
      const bool oracle = testing::winding_number(ring, la, lo) != 0;
      const bool got = !zones.label_point(make_point(la, lo)).is_external();
      mismatches += got != oracle ? 1 : 0;
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << checked << " points, " << mismatches << " mismatches, " << secs << " s";
  return {mismatches == 0 && checked > 29000 && secs < 5.0, d.str()};
}

Outcome ac2_haversine() {
  const auto p = make_point(40.7, -74.0);
  const bool identity = haversine_distance(p, p) == 0.0;
  const double anti = haversine_distance(make_point(0, 0), make_point(0, 180));
  const double expect = std::numbers::pi * 6'371'000.0;
  const bool antipodal = std::abs(anti - expect) <= 1e-6 * expect;
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = make_point(lat(rng), lon(rng)), b = make_point(lat(rng), lon(rng));
    const double ab = haversine_distance(a, b), ba = haversine_distance(b, a);
    if (ab > 0) worst = std::max(worst, std::abs(ab - ba) / ab);
  }
  std::ostringstream d;
  d << "identity " << identity << ", antipodal " << anti << " m, worst asymmetry " << worst;
  return {identity && antipodal && worst <= 1e-12, d.str()};
}

Outcome ac3_speed() {
  const auto zones = std::make_shared<const ZoneSet>(testing::four_grid_zones());
  FilterConfig cfg;
  bool ok = true;
  std::ostringstream d;
  for (double rate : {0.0, 0.01, 0.1}) {
    auto sc = testing::synth_config(zones, 103);
    sc.n_agents = 60;
    sc.anomaly_rate = rate;
    const auto corpus = generate(sc);
    auto tl = build_timelines(corpus.records);
    remove_duplicate_records(tl);
    std::size_t removed = 0, violations = 0;
    for (const auto& [id, t] : tl) {
      const auto r = remove_speed_violations(t, cfg);
      removed += r.removed.size();
      const auto& k = r.timeline.records;
      for (std::size_t i = 1; i < k.size(); ++i) {
        const double dist = haversine_distance(k[i - 1].position, k[i].position);
        const auto dt = (k[i].timestamp - k[i - 1].timestamp).count();
        if (dt <= 0 ? dist > 0.0 : dist / static_cast<double>(dt) > 44.704) ++violations;
      }
    }
    if (violations != 0 || (rate == 0.0 && removed != 0)) ok = false;
    d << "rate " << rate << ": removed " << removed << " (injected " << corpus.anomaly_records << "), violations "
      << violations << "; ";
  }
  return {ok, d.str()};
}

Outcome ac4_pairing() {
  std::mt19937_64 rng(104);
  FilterConfig cfg;
  std::uniform_int_distribution<int> len(0, 20), gap(0, 3 * 3600), jitter(0, 3);
  std::uniform_real_distribution<double> lat(40.70, 40.72), lon(-74.01, -73.99);
  std::size_t total = 0, wrong = 0;
  for (int k = 0; k < 100; ++k) {
    UserTimeline tl;
    tl.user_id = "u" + std::to_string(k);
    std::int64_t t = 1406851200;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      t += jitter(rng) == 0 ? 0 : gap(rng);
      TweetRecord r;
      r.user_id = tl.user_id;
      r.position = make_point(lat(rng), lon(rng));
      r.timestamp = from_unix_seconds(t);
      tl.records.push_back(r);
    }
    const auto got = extract_displacements(tl, cfg);
    std::vector<std::pair<std::size_t, std::size_t>> want;
    const auto& r = tl.records;
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t j = i + 1; j < r.size(); ++j) {
        if (j != i + 1) continue;
        const auto dt = r[j].timestamp - r[i].timestamp;
        if (dt.count() > 0 && dt <= cfg.time_window &&
            haversine_distance(r[i].position, r[j].position) >= cfg.min_displacement_distance) {
          want.emplace_back(i, j);
        }
      }
    }
    total += want.size();
    bool same = got.size() == want.size();
    for (std::size_t m = 0; same && m < got.size(); ++m) {
      const auto& a = r[want[m].first];
      const auto& b = r[want[m].second];
      same = got[m].start_time == a.timestamp && got[m].end_time == b.timestamp && got[m].origin == a.position &&
             got[m].destination == b.position &&
             got[m].distance == haversine_distance(a.position, b.position);
    }
    wrong += same ? 0 : 1;
  }
  std::ostringstream d;
  d << "100 timelines, " << total << " oracle displacements, " << wrong << " mismatching timelines";
  return {wrong == 0, d.str()};
}

Outcome ac5_od() {
  const auto t0 = Clock::now();
  const auto zones = std::make_shared<const ZoneSet>(testing::four_grid_zones());
  auto sc = testing::synth_config(zones, 105);
  Eigen::MatrixXd planted(4, 4);
  planted << 0, 0.20, 0.05, 0.10,  //
      0.15, 0, 0.05, 0.05,         //
      0.05, 0.05, 0, 0.10,         //
      0.10, 0.05, 0.05, 0;
  sc.od_weights = planted;
  sc.target_tweets = 50000;
  const auto corpus = generate(sc);
  auto tl = build_timelines(corpus.records);
  remove_duplicate_records(tl);
  const auto ex = run_extraction(tl, *zones, FilterConfig{});
  const auto od = aggregate_od(ex.displacements, false, false, zones->zone_ids());
  const double l1 = (od.proportions - planted).cwiseAbs().sum();
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << corpus.records.size() << " tweets, " << od.total() << " OD displacements, L1 " << l1 << ", " << secs << " s";
  return {l1 <= 0.05 && secs < 30.0, d.str()};
}

Outcome ac6_time_of_day() {
  const auto zones = std::make_shared<const ZoneSet>(testing::four_grid_zones());
  auto sc = testing::synth_config(zones, 106);
  TripSchedule s = TripSchedule::Zero();
  for (int h : {7, 8, 9, 16, 17, 18, 19}) s.row(h).setOnes();
  sc.trip_schedule = s;
  sc.target_tweets = 50000;
  const auto corpus = generate(sc);
  auto tl = build_timelines(corpus.records);
  remove_duplicate_records(tl);
  const auto ex = run_extraction(tl, *zones, FilterConfig{});
  const auto h = aggregate_time_of_day(ex.displacements, DirectionFilter{}, TimeZone());
  const HourCounts both = h.weekday + h.weekend;
  std::int64_t planted = 0;
  for (int hr : {7, 8, 9, 16, 17, 18, 19}) planted += both[hr];
  const double share = static_cast<double>(planted) / static_cast<double>(both.sum());
  std::ostringstream d;
  d << both.sum() << " crossings, " << share * 100 << "% in planted bins";
  return {share >= 0.90, d.str()};
}

Outcome ac7_groups() {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<std::size_t> tweets(100, 400), disps(0, 300);  // narrow range forces ties
  std::vector<UserProfile> p;
  for (int i = 0; i < 1000; ++i) p.push_back({"user" + std::to_string(1000 - i), tweets(rng), disps(rng)});
  const auto g = classify_groups(p, 0.01);
  // oracle: independent ordering by (-tweets, id), cut at ceil(0.01 * N)
  auto ranked = p;
  std::sort(ranked.begin(), ranked.end(), [](const UserProfile& a, const UserProfile& b) {
    return std::tie(b.tweet_count, a.user_id) < std::tie(a.tweet_count, b.user_id);
  });
  const auto cut = static_cast<std::size_t>(std::ceil(0.01 * 1000));
  std::vector<std::string> want_high;
  double high = 0, total = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    total += static_cast<double>(ranked[i].displacement_count);
    if (i < cut) {
      want_high.push_back(ranked[i].user_id);
      high += static_cast<double>(ranked[i].displacement_count);
    }
  }
  const bool exact = g.high_group == want_high && g.low_group.size() == 1000 - cut &&
                     std::abs(g.share_of_displacements_high - high / total) < 1e-12;
  for (auto& u : p) u.tweet_count *= 7;
  const bool scaled = classify_groups(p, 0.01).high_group == g.high_group;
  std::ostringstream d;
  d << "high group " << g.high_group.size() << ", oracle match " << exact << ", scale-invariant " << scaled;
  return {exact && scaled, d.str()};
}

Outcome ac8_average_display() {
  RunReport r;
  r.displacements_total = 96471;
  r.travelers = 6638;
  const bool display = r.average_display() == "14.5";
  const bool average = r.average_displacements_per_traveler() == 96471.0 / 6638.0;
  std::ostringstream d;
  d << "displayed " << r.average_display();
  return {display && average, d.str()};
}

Outcome ac9_determinism() {
  const auto t0 = Clock::now();
  const auto dir = testing::temp_dir("acceptance_det");
  testing::write_file(dir / "zones.geojson", zones_to_geojson(testing::four_grid_zones()));
  app::SynthOptions sy;
  sy.config = testing::synth_config(std::make_shared<const ZoneSet>(testing::four_grid_zones()), 109);
  sy.config.target_tweets = 1'000'000;
  sy.config.anomaly_rate = 0.01;
  sy.out_dir = dir;
  const auto corpus = app::cmd_synth(sy);
  const double synth_secs = seconds_since(t0);

  const auto t1 = Clock::now();
  for (unsigned w : {1u, 8u}) {
    app::ExtractOptions ex;
    ex.inputs = {dir / "corpus.csv"};
    ex.zones = dir / "zones.geojson";
    ex.out_dir = dir / ("w" + std::to_string(w));
    ex.workers = w;
    app::cmd_extract(ex);
    app::AnalyzeOptions an;
    an.displacements = ex.out_dir / "displacements.csv";
    an.zones = ex.zones;
    an.focal_zone = "z0";
    an.out_dir = ex.out_dir;
    an.workers = w;
    app::cmd_analyze(an);
  }
  const double secs = seconds_since(t1);
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(dir / "w1")) {
    ++files;
    if (testing::read_file(e.path()) != testing::read_file(dir / "w8" / e.path().filename())) ++differ;
  }
  fs::remove_all(dir);
  std::ostringstream d;
  d << corpus.records.size() << " records, " << files << " output files, " << differ << " differ; extract+analyze x2 "
    << secs << " s (synth " << synth_secs << " s)";
  return {differ == 0 && files >= 10 && corpus.records.size() >= 1'000'000 && secs < 60.0, d.str()};
}

Outcome ac10_conservation() {
  const auto dir = testing::temp_dir("acceptance_count");
  testing::write_file(dir / "zones.geojson", zones_to_geojson(testing::four_grid_zones()));
  auto sc = testing::synth_config(std::make_shared<const ZoneSet>(testing::four_grid_zones()), 110);
  sc.n_agents = 80;
  sc.anomaly_rate = 0.02;
  auto corpus = generate(sc);
  // duplicate a slice so dedupe has work
  for (std::size_t i = 0; i < corpus.records.size(); i += 97) corpus.records.push_back(corpus.records[i]);
  std::ostringstream csv;
  write_records_csv(csv, corpus.records);
  // corrupt every 50th data line
  std::istringstream in(csv.str());
  std::string line, text;
  std::size_t data_lines = 0;
  std::getline(in, line);
  text = line + "\n";
  while (std::getline(in, line)) {
    ++data_lines;
    if (data_lines % 50 == 0) line = "broken,999,0,not-a-time";
    text += line + "\n";
  }
  testing::write_file(dir / "corpus.csv", text);
  app::ExtractOptions ex;
  ex.inputs = {dir / "corpus.csv"};
  ex.zones = dir / "zones.geojson";
  ex.out_dir = dir / "run";
  const auto r = app::cmd_extract(ex);
  const auto violations = r.consistency_violations();
  fs::remove_all(dir);
  std::ostringstream d;
  d << "lines " << r.lines_read << " = parsed " << r.records_parsed << " + rejected " << r.lines_rejected
    << "; duplicates " << r.duplicates_removed << "; " << violations.size() << " report violations";
  return {r.lines_read == data_lines && r.lines_read == r.records_parsed + r.lines_rejected &&
              r.lines_rejected == data_lines / 50 && r.duplicates_removed > 0 && violations.empty(),
          d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 point-in-polygon oracle equivalence", ac1_pip},
      {"AC2 haversine identity, antipodes, symmetry", ac2_haversine},
      {"AC3 speed-filter postcondition", ac3_speed},
      {"AC4 displacement pairing oracle", ac4_pairing},
      {"AC5 synthetic OD recovery", ac5_od},
      {"AC6 time-of-day recovery", ac6_time_of_day},
      {"AC7 group classification oracle", ac7_groups},
      {"AC8 average-per-traveler display", ac8_average_display},
      {"AC9 determinism across worker counts", ac9_determinism},
      {"AC10 count conservation", ac10_conservation},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << " -- " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
