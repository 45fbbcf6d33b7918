// geotrips: extract displacements from geotagged posts and aggregate them.
//
//   geotrips extract --input posts.csv --zones counties.geojson --out run/
//   geotrips analyze --displacements run/displacements.csv --focal-zone manhattan --out run/
//   geotrips compare a.csv b.csv
//   geotrips synth --config synth.conf --out corpus/
//
// Every subcommand takes `--config FILE`, a flat `key = value` file whose keys are
// the long option names; flags given on the command line win.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "geotrips/app.hpp"
#include "geotrips/error.hpp"

namespace {

using namespace geotrips;

/// Expands `--config FILE` into `--key=value` arguments placed before the rest, so
/// explicit flags (parsed later, last one wins) override file values.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::vector<std::string> from_file, rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigINI().from_file(path);
    } catch (const CLI::FileError&) {
      throw ConfigError("config file not found: " + path);
    }
    for (const auto& item : items) {
      if (item.name == "++" || item.name == "--" || item.inputs.empty()) continue;
      std::string key = item.name;
      for (auto& c : key) {
        if (c == '_') c = '-';
      }
      std::string value;
      for (std::size_t k = 0; k < item.inputs.size(); ++k) value += (k ? "," : "") + item.inputs[k];
      from_file.push_back("--" + key + "=" + value);
    }
  }
  if (rest.empty()) return from_file;
  // Subcommand name stays first.
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

TimeZone resolve_tz(const std::string& name) {
  return name.empty() ? TimeZone::from_environment() : TimeZone::load(name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Displacement extraction and travel-behavior aggregation for geotagged posts"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");

  auto add_config = [](CLI::App* sub) {
    sub->add_option("--config", "Flat key = value file with option defaults");
  };

  // extract
  app::ExtractOptions ex;
  std::string ex_format = "csv", ex_zones, ex_tz, ex_out = ".";
  std::vector<std::string> ex_inputs;
  double max_speed_mph = 100.0, window_h = 2.0;
  auto* extract = app.add_subcommand("extract", "Parse records, filter users and GPS errors, pair displacements");
  add_config(extract);
  extract->add_option("--input,-i", ex_inputs, "Record file(s)")->required()->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  extract->add_option("--format", ex_format, "csv or jsonl")->capture_default_str();
  extract->add_flag("--legacy-timestamps", ex.legacy_timestamps, "Also accept 'M/D/YYYY HH:MM' in --tz");
  extract->add_option("--zones,-z", ex_zones, "GeoJSON zone map")->required();
  extract->add_option("--min-tweets", ex.filter.min_tweets, "Activity threshold (inclusive)")->capture_default_str();
  extract->add_option("--max-speed-mph", max_speed_mph, "Speed filter bound")->capture_default_str();
  extract->add_option("--time-window-h", window_h, "Pairing window in hours")->capture_default_str();
  extract->add_option("--min-displacement-m", ex.filter.min_displacement_distance, "Jitter floor in meters")
      ->capture_default_str();
  extract->add_option("--tz", ex_tz, "Time zone for legacy timestamps (default $GEOTRIPS_TZ or UTC)");
  extract->add_option("--out,-o", ex_out, "Output directory")->capture_default_str();
  extract->add_option("--workers", ex.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  // analyze
  app::AnalyzeOptions an;
  std::string an_disp, an_profiles, an_zones, an_tz, an_focal, an_out = ".";
  auto* analyze = app.add_subcommand("analyze", "OD matrices, time-of-day histograms and user groups");
  add_config(analyze);
  analyze->add_option("--displacements,-d", an_disp, "displacements.csv from extract")->required();
  analyze->add_option("--profiles", an_profiles, "user_profiles.csv (default: next to displacements)");
  analyze->add_option("--zones,-z", an_zones, "GeoJSON zone map, for OD ordering");
  analyze->add_option("--tz", an_tz, "Analysis time zone (default $GEOTRIPS_TZ or UTC)");
  analyze->add_option("--focal-zone", an_focal, "Emit to/from histograms for this zone");
  analyze->add_flag("--include-intra", an.include_intra, "Count intra-zone displacements");
  analyze->add_flag("--include-external", an.include_external, "Count displacements touching EXTERNAL");
  analyze->add_option("--group-cutoff", an.group_cutoff, "High-frequency user fraction")->capture_default_str();
  analyze->add_option("--out,-o", an_out, "Output directory")->capture_default_str();
  analyze->add_option("--workers", an.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  // compare
  std::string cmp_a, cmp_b, cmp_out;
  bool cmp_normalize = false;
  auto* compare = app.add_subcommand("compare", "L1 distance and Pearson r between two bin_label,value series");
  add_config(compare);
  compare->add_option("series_a", cmp_a, "First series CSV")->required();
  compare->add_option("series_b", cmp_b, "Second series CSV")->required();
  compare->add_flag("--normalize", cmp_normalize, "Scale raw values to sum to 1 first");
  compare->add_option("--out,-o", cmp_out, "Write JSON here instead of stdout");

  // synth
  app::SynthOptions sy;
  std::string sy_zones, sy_od, sy_weekday, sy_weekend, sy_format = "csv", sy_out = ".";
  double sy_window_h = 2.0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  add_config(synth);
  synth->add_option("--seed", sy.config.seed)->capture_default_str();
  synth->add_option("--n-agents", sy.config.n_agents)->capture_default_str();
  synth->add_option("--target-tweets", sy.config.target_tweets, "Generate agents until this many tweets")
      ->capture_default_str();
  synth->add_option("--zones,-z", sy_zones, "GeoJSON zone map")->required();
  synth->add_option("--od-weights", sy_od, "Row-major weights, rows separated by ';' (default uniform off-diagonal)");
  synth->add_option("--tweets-pareto-alpha", sy.config.tweets_pareto_alpha)->capture_default_str();
  synth->add_option("--tweets-min", sy.config.tweets_min)->capture_default_str();
  synth->add_option("--tweets-max", sy.config.tweets_max)->capture_default_str();
  synth->add_option("--schedule-weekday", sy_weekday, "24 hourly weights (default commuter peaks)");
  synth->add_option("--schedule-weekend", sy_weekend, "24 hourly weights");
  synth->add_option("--gps-noise-sigma-m", sy.config.gps_noise_sigma_m)->capture_default_str();
  synth->add_option("--anomaly-rate", sy.config.anomaly_rate)->capture_default_str();
  synth->add_option("--unobserved-rate", sy.config.unobserved_rate)->capture_default_str();
  synth->add_option("--start-date", sy.config.start_date)->capture_default_str();
  synth->add_option("--tz", sy.config.timezone)->capture_default_str();
  synth->add_option("--time-window-h", sy_window_h)->capture_default_str();
  synth->add_option("--recoverable-min-tweets", sy.config.recoverable_min_tweets)->capture_default_str();
  synth->add_option("--anchor-margin-m", sy.config.anchor_margin_m)->capture_default_str();
  synth->add_option("--format", sy_format, "csv or jsonl")->capture_default_str();
  synth->add_option("--out,-o", sy_out, "Output directory")->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*extract) {
      for (const auto& p : ex_inputs) ex.inputs.emplace_back(p);
      ex.format = parse_record_format(ex_format);
      ex.zones = ex_zones;
      ex.timezone = resolve_tz(ex_tz);
      ex.out_dir = ex_out;
      ex.filter.max_speed = max_speed_mph * kMetersPerSecondPerMph;
      ex.filter.time_window = Seconds{static_cast<std::int64_t>(window_h * 3600.0 + 0.5)};
      const auto report = app::cmd_extract(ex);
      std::cout << report.to_table();
    } else if (*analyze) {
      an.displacements = an_disp;
      if (!an_profiles.empty()) an.profiles = an_profiles;
      if (!an_zones.empty()) an.zones = an_zones;
      if (!an_focal.empty()) an.focal_zone = an_focal;
      an.timezone = resolve_tz(an_tz);
      an.out_dir = an_out;
      const auto summary = app::cmd_analyze(an);
      std::cout << "displacements read: " << summary.displacements << "\n"
                << "OD displacements:   " << summary.od_total << "\n";
      if (summary.groups) {
        std::cout << "high-frequency users: " << summary.groups->high_group.size()
                  << " (share of displacements " << summary.groups->share_of_displacements_high << ")\n";
      }
      for (const auto& p : summary.written) std::cout << "wrote " << p.string() << "\n";
    } else if (*compare) {
      const auto result = app::cmd_compare(cmp_a, cmp_b, cmp_normalize);
      const auto json = comparison_to_json(result);
      if (cmp_out.empty()) {
        std::cout << json;
      } else {
        std::ofstream out(cmp_out, std::ios::binary);
        if (!out) throw IoError("cannot write '" + cmp_out + "'");
        out << json;
      }
    } else if (*synth) {
      if (!std::filesystem::exists(sy_zones)) throw ConfigError("zones file not found: " + sy_zones);
      auto zones = std::make_shared<const ZoneSet>(load_zones_file(sy_zones));
      const auto n = static_cast<Eigen::Index>(zones->size());
      if (sy_od.empty()) {
        sy.config.od_weights = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n * (n - 1)));
        sy.config.od_weights.diagonal().setZero();
      } else {
        sy.config.od_weights = app::parse_matrix(sy_od);
      }
      sy.config.zones = std::move(zones);
      sy.config.trip_schedule = commuter_schedule();
      if (!sy_weekday.empty()) sy.config.trip_schedule.col(0) = app::parse_hour_weights(sy_weekday);
      if (!sy_weekend.empty()) sy.config.trip_schedule.col(1) = app::parse_hour_weights(sy_weekend);
      sy.config.time_window = Seconds{static_cast<std::int64_t>(sy_window_h * 3600.0 + 0.5)};
      sy.format = parse_record_format(sy_format);
      sy.out_dir = sy_out;
      const auto corpus = app::cmd_synth(sy);
      std::size_t recoverable = 0;
      for (const auto& t : corpus.trips) recoverable += t.recoverable ? 1 : 0;
      std::cout << "records: " << corpus.records.size() << " (anomalies " << corpus.anomaly_records << ")\n"
                << "trips:   " << corpus.trips.size() << " (recoverable " << recoverable << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
