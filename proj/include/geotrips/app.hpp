#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geotrips/analytics.hpp"
#include "geotrips/displacement.hpp"
#include "geotrips/ingest.hpp"
#include "geotrips/report.hpp"
#include "geotrips/synthgen.hpp"

namespace geotrips::app {

namespace fs = std::filesystem;

struct ExtractOptions {
  std::vector<fs::path> inputs;
  RecordFormat format = RecordFormat::csv;
  bool legacy_timestamps = false;
  fs::path zones;
  FilterConfig filter;
  TimeZone timezone;
  fs::path out_dir = ".";
  unsigned workers = 1;
};

/// Full pipeline. Writes displacements.csv, run_report.json, rejects.csv,
/// speed_removals.csv and user_profiles.csv into out_dir. Throws on fatal errors,
/// including a report that fails its consistency checks.
RunReport cmd_extract(const ExtractOptions& opts);

struct AnalyzeOptions {
  fs::path displacements;
  /// user_profiles.csv from extract; defaults to the one next to `displacements`.
  std::optional<fs::path> profiles;
  /// Optional zone map, only used to order OD rows and columns.
  std::optional<fs::path> zones;
  fs::path out_dir = ".";
  TimeZone timezone;
  std::optional<std::string> focal_zone;
  bool include_intra = false;
  bool include_external = false;
  double group_cutoff = 0.01;
  unsigned workers = 1;
};

struct AnalyzeSummary {
  std::size_t displacements = 0;
  std::int64_t od_total = 0;
  std::optional<GroupPartition> groups;
  std::vector<fs::path> written;
};

/// Writes od_counts.csv, od_proportions.csv, tod_all.csv, tod_to_<focal>.csv and
/// tod_from_<focal>.csv (with a focal zone), groups.csv (when profiles exist) and
/// analysis_summary.json.
AnalyzeSummary cmd_analyze(const AnalyzeOptions& opts);

/// Compares two `bin_label,value` series. With `normalize`, raw values are scaled
/// to sum to 1 first. Labels must agree bin by bin.
DistributionComparison cmd_compare(const fs::path& series_a, const fs::path& series_b, bool normalize = false);

struct SynthOptions {
  SynthConfig config;
  RecordFormat format = RecordFormat::csv;
  fs::path out_dir = ".";
};

/// Writes corpus.csv (or corpus.jsonl), ground_truth.csv and
/// ground_truth_recoverable.csv.
SynthCorpus cmd_synth(const SynthOptions& opts);

/// Parses "0,0.7;0.3,0" (rows separated by ';') into a square matrix.
Eigen::MatrixXd parse_matrix(const std::string& text);

/// Parses 24 comma-separated weights.
Eigen::Matrix<double, 24, 1> parse_hour_weights(const std::string& text);

std::vector<UserProfile> read_profiles_csv(const fs::path& path);

}  // namespace geotrips::app
