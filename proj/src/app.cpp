#include "geotrips/app.hpp"

#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>

#include "geotrips/csv.hpp"
#include "geotrips/error.hpp"
#include "json.hpp"

namespace geotrips::app {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Writer>
fs::path write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
  return path;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

std::string file_safe(const std::string& id) {
  std::string out;
  for (char c : id) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out;
}

}  // namespace

RunReport cmd_extract(const ExtractOptions& opts) {
  opts.filter.validate();
  if (opts.inputs.empty()) throw ConfigError("no input files given");
  for (const auto& in : opts.inputs) {
    if (!fs::exists(in)) throw IoError("input file not found: " + in.string());
  }
  if (!fs::exists(opts.zones)) throw ConfigError("zones file not found: " + opts.zones.string());

  auto t0 = Clock::now();
  const ZoneSet zones = load_zones_file(opts.zones);
  const double t_zones = seconds_since(t0);

  t0 = Clock::now();
  ParseOptions popts;
  popts.format = opts.format;
  popts.legacy_timestamps = opts.legacy_timestamps;
  popts.timezone = opts.timezone;
  popts.workers = opts.workers;
  std::vector<TweetRecord> records;
  std::vector<RejectedLine> rejected;
  std::size_t lines_read = 0;
  for (const auto& in : opts.inputs) {
    auto parsed = parse_records_file(in, popts);
    lines_read += parsed.lines_read;
    for (auto& r : parsed.records) records.push_back(std::move(r));
    for (auto& r : parsed.rejected) {
      if (opts.inputs.size() > 1) r.reason = in.filename().string() + ": " + r.reason;
      rejected.push_back(std::move(r));
    }
  }
  const double t_parse = seconds_since(t0);
  const std::size_t records_parsed = records.size();

  t0 = Clock::now();
  TimelineMap timelines = build_timelines(std::move(records), opts.workers);
  const std::size_t duplicates = remove_duplicate_records(timelines);
  const double t_timelines = seconds_since(t0);

  auto result = run_extraction(timelines, zones, opts.filter, opts.workers);
  auto& report = result.report;
  report.lines_read = lines_read;
  report.records_parsed = records_parsed;
  report.lines_rejected = rejected.size();
  report.duplicates_removed = duplicates;
  report.stage_seconds.insert(report.stage_seconds.begin(),
                              {{"load zones", t_zones}, {"parse", t_parse}, {"timelines", t_timelines}});

  if (auto bad = report.consistency_violations(); !bad.empty()) {
    std::string msg = "run report consistency check failed:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw Error(msg);
  }

  t0 = Clock::now();
  ensure_dir(opts.out_dir);
  write_file(opts.out_dir / "displacements.csv",
             [&](std::ostream& os) { write_displacements_csv(os, result.displacements); });
  write_file(opts.out_dir / "rejects.csv", [&](std::ostream& os) { write_rejects_csv(os, rejected); });
  write_file(opts.out_dir / "speed_removals.csv",
             [&](std::ostream& os) { write_records_csv(os, result.speed_removals); });
  write_file(opts.out_dir / "user_profiles.csv", [&](std::ostream& os) {
    os << "user_id,tweet_count,displacement_count\n";
    for (const auto& u : result.users) {
      os << csv::quote(u.user_id) << ',' << u.tweet_count << ',' << u.displacement_count << '\n';
    }
  });
  write_file(opts.out_dir / "run_report.json", [&](std::ostream& os) { os << report.to_json(); });
  report.stage_seconds.emplace_back("write outputs", seconds_since(t0));
  return report;
}

std::vector<UserProfile> read_profiles_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open profiles file '" + path.string() + "'");
  std::vector<UserProfile> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || csv::trim(line).empty()) continue;
    auto f = csv::split_line(line);
    if (!f || f->size() < 3) throw FormatMismatchError("profiles line " + std::to_string(line_no) + ": expected 3 fields");
    auto tweets = csv::parse_int((*f)[1]);
    auto disp = csv::parse_int((*f)[2]);
    if (!tweets || !disp || *tweets < 0 || *disp < 0) {
      throw FormatMismatchError("profiles line " + std::to_string(line_no) + ": bad count");
    }
    out.push_back({(*f)[0], static_cast<std::size_t>(*tweets), static_cast<std::size_t>(*disp)});
  }
  return out;
}

AnalyzeSummary cmd_analyze(const AnalyzeOptions& opts) {
  std::ifstream in(opts.displacements, std::ios::binary);
  if (!in) throw IoError("cannot open displacement file '" + opts.displacements.string() + "'");
  const auto displacements = read_displacements_csv(in);

  std::vector<std::string> order;
  if (opts.zones) order = load_zones_file(*opts.zones).zone_ids();

  AnalyzeSummary summary;
  summary.displacements = displacements.size();
  const ODMatrix od = aggregate_od(displacements, opts.include_intra, opts.include_external, order);
  summary.od_total = od.total();

  std::optional<fs::path> profiles_path = opts.profiles;
  if (!profiles_path) {
    const auto sibling = opts.displacements.parent_path() / "user_profiles.csv";
    if (fs::exists(sibling)) profiles_path = sibling;
  }
  if (profiles_path) {
    auto profiles = read_profiles_csv(*profiles_path);
    if (!profiles.empty()) summary.groups = classify_groups(std::move(profiles), opts.group_cutoff);
  }

  ensure_dir(opts.out_dir);
  summary.written.push_back(write_file(opts.out_dir / "od_counts.csv", [&](std::ostream& os) { write_od_counts_csv(os, od); }));
  summary.written.push_back(
      write_file(opts.out_dir / "od_proportions.csv", [&](std::ostream& os) { write_od_proportions_csv(os, od); }));

  DirectionFilter all;
  all.include_intra = opts.include_intra;
  all.include_external = opts.include_external;
  const auto hist_all = aggregate_time_of_day(displacements, all, opts.timezone, opts.workers);
  summary.written.push_back(write_file(opts.out_dir / "tod_all.csv", [&](std::ostream& os) { write_histogram_csv(os, hist_all); }));

  nlohmann::ordered_json j;
  j["displacements_read"] = displacements.size();
  j["od_included_displacements"] = od.total();
  j["include_intra"] = opts.include_intra;
  j["include_external"] = opts.include_external;
  j["timezone"] = opts.timezone.name();
  j["zones"] = od.zone_ids;

  if (opts.focal_zone) {
    const std::string& focal = *opts.focal_zone;
    DirectionFilter to = all, from = all;
    to.to = focal;
    from.from = focal;
    const auto hist_to = aggregate_time_of_day(displacements, to, opts.timezone, opts.workers);
    const auto hist_from = aggregate_time_of_day(displacements, from, opts.timezone, opts.workers);
    summary.written.push_back(write_file(opts.out_dir / ("tod_to_" + file_safe(focal) + ".csv"),
                                         [&](std::ostream& os) { write_histogram_csv(os, hist_to); }));
    summary.written.push_back(write_file(opts.out_dir / ("tod_from_" + file_safe(focal) + ".csv"),
                                         [&](std::ostream& os) { write_histogram_csv(os, hist_from); }));
    j["focal_zone"] = focal;
    j["focal_to_count"] = hist_to.total();
    j["focal_from_count"] = hist_from.total();
  }

  if (summary.groups) {
    const auto& g = *summary.groups;
    summary.written.push_back(write_file(opts.out_dir / "groups.csv", [&](std::ostream& os) {
      os << "user_id,tweet_count,displacement_count,group\n";
      for (const auto& p : g.ranked) {
        os << csv::quote(p.user_id) << ',' << p.tweet_count << ',' << p.displacement_count << ',' << to_string(p.group)
           << '\n';
      }
    }));
    j["group_cutoff"] = g.percentile_cutoff;
    j["high_group_size"] = g.high_group.size();
    j["low_group_size"] = g.low_group.size();
    j["share_of_displacements_high"] = g.share_of_displacements_high;
    j["share_of_displacements_low"] = g.share_of_displacements_low();
  }
  summary.written.push_back(
      write_file(opts.out_dir / "analysis_summary.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; }));
  return summary;
}

DistributionComparison cmd_compare(const fs::path& series_a, const fs::path& series_b, bool normalize) {
  auto load = [&](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open series file '" + p.string() + "'");
    auto s = read_series_csv(in);
    if (normalize) {
      const double total = s.values.sum();
      if (!(total > 0.0)) throw ValidationError("series '" + p.string() + "' has no positive mass");
      s.values /= total;
    }
    return s;
  };
  const auto a = load(series_a);
  const auto b = load(series_b);
  if (a.labels.size() == b.labels.size() && a.labels != b.labels) {
    throw ValidationError("series bin labels differ between files");
  }
  return compare_distributions(a.values, b.values, a.labels);
}

SynthCorpus cmd_synth(const SynthOptions& opts) {
  auto corpus = generate(opts.config);
  ensure_dir(opts.out_dir);
  if (opts.format == RecordFormat::csv) {
    write_file(opts.out_dir / "corpus.csv", [&](std::ostream& os) { write_records_csv(os, corpus.records); });
  } else {
    write_file(opts.out_dir / "corpus.jsonl", [&](std::ostream& os) { write_records_jsonl(os, corpus.records); });
  }
  write_file(opts.out_dir / "ground_truth.csv", [&](std::ostream& os) { write_ground_truth_csv(os, corpus.trips); });
  std::vector<GroundTruthTrip> recoverable;
  for (const auto& t : corpus.trips) {
    if (t.recoverable) recoverable.push_back(t);
  }
  write_file(opts.out_dir / "ground_truth_recoverable.csv",
             [&](std::ostream& os) { write_ground_truth_csv(os, recoverable); });
  return corpus;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    if (csv::trim(row).empty()) continue;
    std::vector<double> values;
    std::stringstream rs(row);
    std::string cell;
    while (std::getline(rs, cell, ',')) {
      auto v = csv::parse_double(cell);
      if (!v) throw ConfigError("matrix entry '" + cell + "' is not a number");
      values.push_back(*v);
    }
    rows.push_back(std::move(values));
  }
  const auto n = rows.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw ConfigError("matrix must be square (rows separated by ';')");
    for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Eigen::Matrix<double, 24, 1> parse_hour_weights(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    auto v = csv::parse_double(cell);
    if (!v) throw ConfigError("hour weight '" + cell + "' is not a number");
    values.push_back(*v);
  }
  if (values.size() != 24) throw ConfigError("expected 24 hourly weights, got " + std::to_string(values.size()));
  return Eigen::Map<const Eigen::Matrix<double, 24, 1>>(values.data());
}

}  // namespace geotrips::app
