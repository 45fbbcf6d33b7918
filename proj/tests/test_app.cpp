#include <sstream>

#include "doctest.h"
#include "geotrips/app.hpp"
#include "geotrips/error.hpp"
#include "test_support.hpp"

using namespace geotrips;
namespace fs = std::filesystem;

namespace {

/// Synth corpus + zones in `dir`; returns the extract options for it.
app::ExtractOptions synth_fixture(const fs::path& dir) {
  testing::write_file(dir / "zones.geojson", zones_to_geojson(testing::four_grid_zones()));
  app::SynthOptions sy;
  sy.config = testing::synth_config(std::make_shared<const ZoneSet>(testing::four_grid_zones()), 3);
  sy.config.n_agents = 25;
  sy.config.anomaly_rate = 0.01;
  sy.out_dir = dir;
  app::cmd_synth(sy);
  app::ExtractOptions ex;
  ex.inputs = {dir / "corpus.csv"};
  ex.zones = dir / "zones.geojson";
  ex.out_dir = dir / "run";
  return ex;
}

}  // namespace

TEST_CASE("average per traveler display") {
  RunReport r;
  r.displacements_total = 96471;
  r.travelers = 6638;
  CHECK(r.average_displacements_per_traveler() == doctest::Approx(14.533).epsilon(1e-4));
  CHECK(r.average_display() == "14.5");
}

TEST_CASE("extract writes outputs and a consistent report") {
  const auto dir = testing::temp_dir("extract");
  const auto ex = synth_fixture(dir);
  const auto report = app::cmd_extract(ex);
  CHECK(report.consistency_violations().empty());
  CHECK(report.displacements_total > 0);
  for (const char* f : {"displacements.csv", "rejects.csv", "speed_removals.csv", "user_profiles.csv", "run_report.json"}) {
    CHECK(fs::exists(ex.out_dir / f));
  }
  CHECK(testing::read_file(ex.out_dir / "displacements.csv")
            .starts_with("user_id,origin_lat,origin_lon,dest_lat,dest_lon,start_time,end_time,duration_s,distance_m,"));
}

TEST_CASE("missing zones file names the problem") {
  const auto dir = testing::temp_dir("missing_zones");
  auto ex = synth_fixture(dir);
  ex.zones = dir / "nope.geojson";
  CHECK_THROWS_WITH_AS(app::cmd_extract(ex), doctest::Contains("zones file not found"), ConfigError);
}

TEST_CASE("extract is worker-count invariant") {
  const auto dir = testing::temp_dir("workers");
  auto ex = synth_fixture(dir);
  ex.workers = 1;
  ex.out_dir = dir / "w1";
  app::cmd_extract(ex);
  ex.workers = 8;
  ex.out_dir = dir / "w8";
  app::cmd_extract(ex);
  for (const char* f : {"displacements.csv", "rejects.csv", "speed_removals.csv", "user_profiles.csv", "run_report.json"}) {
    CHECK(testing::read_file(dir / "w1" / f) == testing::read_file(dir / "w8" / f));
  }
}

TEST_CASE("analyze outputs and idempotence") {
  const auto dir = testing::temp_dir("analyze");
  const auto ex = synth_fixture(dir);
  app::cmd_extract(ex);
  app::AnalyzeOptions an;
  an.displacements = ex.out_dir / "displacements.csv";
  an.zones = dir / "zones.geojson";
  an.focal_zone = "z0";
  an.out_dir = dir / "a1";
  const auto s = app::cmd_analyze(an);
  REQUIRE(s.groups);
  CHECK(s.groups->high_group.size() == 1);
  for (const char* f : {"od_counts.csv", "od_proportions.csv", "tod_all.csv", "tod_to_z0.csv", "tod_from_z0.csv",
                        "groups.csv", "analysis_summary.json"}) {
    CHECK(fs::exists(an.out_dir / f));
  }
  CHECK(testing::read_file(an.out_dir / "od_counts.csv").starts_with("origin,z0,z1,z2,z3\n"));
  an.out_dir = dir / "a2";
  an.workers = 4;
  app::cmd_analyze(an);
  for (const auto& e : fs::directory_iterator(dir / "a1")) {
    CHECK(testing::read_file(e.path()) == testing::read_file(dir / "a2" / e.path().filename()));
  }
}

TEST_CASE("analyze on an empty displacement file") {
  const auto dir = testing::temp_dir("empty_od");
  testing::write_file(dir / "displacements.csv",
                      "user_id,origin_lat,origin_lon,dest_lat,dest_lon,start_time,end_time,duration_s,distance_m,origin_zone,"
                      "dest_zone,crossing_time\n");
  app::AnalyzeOptions an;
  an.displacements = dir / "displacements.csv";
  an.out_dir = dir;
  CHECK_THROWS_WITH_AS(app::cmd_analyze(an), doctest::Contains("empty OD"), ValidationError);
}

TEST_CASE("compare from files") {
  const auto dir = testing::temp_dir("compare");
  testing::write_file(dir / "a.csv", "bin_label,value\nh0,1\nh1,0\nh2,0\nh3,0\n");
  testing::write_file(dir / "b.csv", "bin_label,value\nh0,0\nh1,0\nh2,0\nh3,1\n");
  testing::write_file(dir / "raw.csv", "bin_label,value\nh0,10\nh1,0\nh2,0\nh3,0\n");
  testing::write_file(dir / "other.csv", "bin_label,value\nx0,1\nx1,0\nx2,0\nx3,0\n");
  CHECK(app::cmd_compare(dir / "a.csv", dir / "a.csv").l1_distance == 0.0);
  CHECK(app::cmd_compare(dir / "a.csv", dir / "b.csv").l1_distance == doctest::Approx(2.0));
  CHECK_THROWS_AS(app::cmd_compare(dir / "a.csv", dir / "raw.csv"), ValidationError);
  CHECK(app::cmd_compare(dir / "a.csv", dir / "raw.csv", true).l1_distance == 0.0);
  CHECK_THROWS_AS(app::cmd_compare(dir / "a.csv", dir / "other.csv"), ValidationError);
}

TEST_CASE("matrix and schedule parsing") {
  const auto m = app::parse_matrix("0,0.7;0.3,0");
  CHECK(m.rows() == 2);
  CHECK(m(0, 1) == 0.7);
  CHECK_THROWS_AS(app::parse_matrix("1,2;3"), ConfigError);
  CHECK_THROWS_AS(app::parse_hour_weights("1,2,3"), ConfigError);
  std::string ones = "1";
  for (int i = 1; i < 24; ++i) ones += ",1";
  CHECK(app::parse_hour_weights(ones).sum() == 24.0);
}
