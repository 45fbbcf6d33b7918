#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geotrips/displacement.hpp"
#include "geotrips/time.hpp"

namespace geotrips {

// ---------------------------------------------------------------------------
// User groups

enum class UserGroup { high_frequency, low_frequency };

const char* to_string(UserGroup g);

struct UserProfile {
  std::string user_id;
  std::size_t tweet_count = 0;
  std::size_t displacement_count = 0;
  UserGroup group = UserGroup::low_frequency;
};

struct GroupPartition {
  double percentile_cutoff = 0.01;
  /// All profiles ranked by tweet_count desc, user_id asc, with `group` assigned.
  std::vector<UserProfile> ranked;
  std::vector<std::string> high_group;
  std::vector<std::string> low_group;
  /// Share of all displacements contributed by the high group. With zero
  /// displacements overall the high share is 0 and the low share 1.
  double share_of_displacements_high = 0.0;
  double share_of_displacements_low() const { return 1.0 - share_of_displacements_high; }
};

/// Ranks users by tweet count and puts the top max(1, ceil(cutoff * N)) in the
/// high-frequency group. Throws ValidationError on empty input or cutoff outside (0, 1).
GroupPartition classify_groups(std::vector<UserProfile> profiles, double cutoff = 0.01);

// ---------------------------------------------------------------------------
// Time of day

/// Which displacements a histogram or OD matrix counts. Empty `from`/`to` match any
/// zone. Intra-zone and EXTERNAL-touching displacements are excluded unless enabled.
struct DirectionFilter {
  std::optional<std::string> from;
  std::optional<std::string> to;
  bool include_intra = false;
  bool include_external = false;

  bool matches(const Displacement& d) const;
};

using HourCounts = Eigen::Array<std::int64_t, 24, 1>;
using HourFractions = Eigen::Array<double, 24, 1>;

struct TimeOfDayHistogram {
  DirectionFilter direction;
  HourCounts weekday = HourCounts::Zero();
  HourCounts weekend = HourCounts::Zero();

  std::int64_t total() const { return weekday.sum() + weekend.sum(); }

  /// Bins over their day-type total; all zero when that total is zero.
  HourFractions weekday_fractions() const;
  HourFractions weekend_fractions() const;

  /// Elementwise sum of counts (associative; used to merge partial histograms).
  TimeOfDayHistogram& operator+=(const TimeOfDayHistogram& other);
};

/// Bins matching displacements by local hour of crossing_time_estimate in `tz`;
/// Saturday and Sunday are weekend.
TimeOfDayHistogram user_time_of_day(const std::vector<Displacement>& displacements,
                                    const DirectionFilter& direction, const TimeZone& tz);

/// Same as user_time_of_day over a whole corpus, reduced in parallel.
TimeOfDayHistogram aggregate_time_of_day(const std::vector<Displacement>& displacements,
                                         const DirectionFilter& direction, const TimeZone& tz,
                                         unsigned workers = 1);

void write_histogram_csv(std::ostream& out, const TimeOfDayHistogram& h);

// ---------------------------------------------------------------------------
// Origin-destination

struct ODMatrix {
  std::vector<std::string> zone_ids;  // row/column order
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  Eigen::MatrixXd proportions;

  std::int64_t total() const { return counts.sum(); }
};

/// Counts displacements by (origin zone, destination zone). Zones are ordered by
/// `zone_order` when given (unlisted zones follow, sorted), else sorted; EXTERNAL
/// always last. Excluded cells (diagonal without include_intra, EXTERNAL rows and
/// columns without include_external) hold zero. Throws ValidationError "empty OD".
ODMatrix aggregate_od(const std::vector<Displacement>& displacements, bool include_intra,
                      bool include_external, const std::vector<std::string>& zone_order = {});

void write_od_counts_csv(std::ostream& out, const ODMatrix& od);
void write_od_proportions_csv(std::ostream& out, const ODMatrix& od);

// ---------------------------------------------------------------------------
// Distribution comparison

struct DistributionComparison {
  std::vector<std::string> labels;
  std::vector<Eigen::VectorXd> series;
  double l1_distance = 0.0;
  /// NaN when one series is constant and the series differ.
  double pearson_r = 0.0;
};

inline constexpr double kNormalizationTolerance = 1e-9;

/// L1 distance and Pearson correlation of two normalized series. Throws
/// ValidationError on length mismatch, length < 2, negative entries or sums off 1.
DistributionComparison compare_distributions(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                             std::vector<std::string> labels = {});

struct LabeledSeries {
  std::vector<std::string> labels;
  Eigen::VectorXd values;
};

/// Reads `bin_label,value` rows; a non-numeric first row is taken as a header.
LabeledSeries read_series_csv(std::istream& in);

std::string comparison_to_json(const DistributionComparison& c);

}  // namespace geotrips
