#include "geotrips/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include "geotrips/csv.hpp"
#include "geotrips/error.hpp"
#include "geotrips/parallel.hpp"
#include "json.hpp"

namespace geotrips {

const char* to_string(UserGroup g) {
  return g == UserGroup::high_frequency ? "HIGH_FREQUENCY" : "LOW_FREQUENCY";
}

GroupPartition classify_groups(std::vector<UserProfile> profiles, double cutoff) {
  if (profiles.empty()) throw ValidationError("classify_groups: no user profiles");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw ValidationError("classify_groups: cutoff must be in (0, 1)");

  std::sort(profiles.begin(), profiles.end(), [](const UserProfile& a, const UserProfile& b) {
    if (a.tweet_count != b.tweet_count) return a.tweet_count > b.tweet_count;
    return a.user_id < b.user_id;
  });
  const auto n = profiles.size();
  const auto high = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cutoff * static_cast<double>(n))));

  GroupPartition part;
  part.percentile_cutoff = cutoff;
  std::size_t high_disp = 0, all_disp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = profiles[i];
    all_disp += p.displacement_count;
    if (i < high) {
      p.group = UserGroup::high_frequency;
      part.high_group.push_back(p.user_id);
      high_disp += p.displacement_count;
    } else {
      p.group = UserGroup::low_frequency;
      part.low_group.push_back(p.user_id);
    }
  }
  part.share_of_displacements_high =
      all_disp == 0 ? 0.0 : static_cast<double>(high_disp) / static_cast<double>(all_disp);
  part.ranked = std::move(profiles);
  return part;
}

bool DirectionFilter::matches(const Displacement& d) const {
  if (!include_external && d.touches_external()) return false;
  if (!include_intra && d.origin_zone == d.destination_zone) return false;
  if (from && d.origin_zone.id() != *from) return false;
  if (to && d.destination_zone.id() != *to) return false;
  return true;
}

namespace {

HourFractions normalized(const HourCounts& counts) {
  const auto total = counts.sum();
  if (total == 0) return HourFractions::Zero();
  return counts.cast<double>() / static_cast<double>(total);
}

void accumulate(TimeOfDayHistogram& h, const Displacement& d, const TimeZone& tz) {
  if (!h.direction.matches(d)) return;
  const int hour = tz.local_hour(d.crossing_time_estimate);
  if (tz.is_weekend(d.crossing_time_estimate)) {
    ++h.weekend(hour);
  } else {
    ++h.weekday(hour);
  }
}

}  // namespace

HourFractions TimeOfDayHistogram::weekday_fractions() const { return normalized(weekday); }
HourFractions TimeOfDayHistogram::weekend_fractions() const { return normalized(weekend); }

TimeOfDayHistogram& TimeOfDayHistogram::operator+=(const TimeOfDayHistogram& other) {
  weekday += other.weekday;
  weekend += other.weekend;
  return *this;
}

TimeOfDayHistogram user_time_of_day(const std::vector<Displacement>& displacements,
                                    const DirectionFilter& direction, const TimeZone& tz) {
  TimeOfDayHistogram h;
  h.direction = direction;
  for (const auto& d : displacements) accumulate(h, d, tz);
  return h;
}

TimeOfDayHistogram aggregate_time_of_day(const std::vector<Displacement>& displacements,
                                         const DirectionFilter& direction, const TimeZone& tz,
                                         unsigned workers) {
  const std::size_t parts = std::max(1u, workers);
  std::vector<TimeOfDayHistogram> partial(parts);
  const std::size_t block = (displacements.size() + parts - 1) / parts;
  parallel_for(parts, workers, [&](std::size_t p) {
    partial[p].direction = direction;
    const auto begin = std::min(displacements.size(), p * block);
    const auto end = std::min(displacements.size(), begin + block);
    for (auto i = begin; i < end; ++i) accumulate(partial[p], displacements[i], tz);
  });
  TimeOfDayHistogram h;
  h.direction = direction;
  for (const auto& p : partial) h += p;
  return h;
}

void write_histogram_csv(std::ostream& out, const TimeOfDayHistogram& h) {
  const auto wd = h.weekday_fractions();
  const auto we = h.weekend_fractions();
  out << "hour,weekday_count,weekend_count,weekday_frac,weekend_frac\n";
  for (int i = 0; i < 24; ++i) {
    out << i << ',' << h.weekday(i) << ',' << h.weekend(i) << ',' << csv::format_double(wd(i)) << ','
        << csv::format_double(we(i)) << '\n';
  }
}

ODMatrix aggregate_od(const std::vector<Displacement>& displacements, bool include_intra,
                      bool include_external, const std::vector<std::string>& zone_order) {
  DirectionFilter filter;
  filter.include_intra = include_intra;
  filter.include_external = include_external;

  std::set<std::string> seen;
  std::size_t included = 0;
  for (const auto& d : displacements) {
    if (!filter.matches(d)) continue;
    ++included;
    seen.insert(d.origin_zone.id());
    seen.insert(d.destination_zone.id());
  }
  if (included == 0) throw ValidationError("empty OD: no displacements survive the filters");

  ODMatrix od;
  std::set<std::string> placed;
  for (const auto& z : zone_order) {
    if (z != ZoneLabel::kExternalId && placed.insert(z).second) od.zone_ids.push_back(z);
  }
  for (const auto& z : seen) {
    if (z != ZoneLabel::kExternalId && placed.insert(z).second) od.zone_ids.push_back(z);
  }
  if (include_external) od.zone_ids.emplace_back(ZoneLabel::kExternalId);

  std::map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < od.zone_ids.size(); ++i) index[od.zone_ids[i]] = static_cast<Eigen::Index>(i);
  const auto n = static_cast<Eigen::Index>(od.zone_ids.size());
  od.counts.setZero(n, n);
  for (const auto& d : displacements) {
    if (!filter.matches(d)) continue;
    ++od.counts(index.at(d.origin_zone.id()), index.at(d.destination_zone.id()));
  }
  od.proportions = od.counts.cast<double>() / static_cast<double>(od.total());
  return od;
}

namespace {

template <typename Matrix, typename Fmt>
void write_matrix_csv(std::ostream& out, const ODMatrix& od, const Matrix& m, Fmt fmt) {
  out << "origin";
  for (const auto& z : od.zone_ids) out << ',' << csv::quote(z);
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << csv::quote(od.zone_ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << fmt(m(i, j));
    out << '\n';
  }
}

}  // namespace

void write_od_counts_csv(std::ostream& out, const ODMatrix& od) {
  write_matrix_csv(out, od, od.counts, [](std::int64_t v) { return std::to_string(v); });
}

void write_od_proportions_csv(std::ostream& out, const ODMatrix& od) {
  write_matrix_csv(out, od, od.proportions, [](double v) { return csv::format_double(v); });
}

DistributionComparison compare_distributions(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                             std::vector<std::string> labels) {
  if (a.size() != b.size()) {
    throw ValidationError("series length mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  if (a.size() < 2) throw ValidationError("series must have at least 2 bins");
  for (const auto* s : {&a, &b}) {
    if (!s->allFinite() || (s->array() < 0.0).any()) throw ValidationError("series has negative or non-finite values");
    if (std::abs(s->sum() - 1.0) > kNormalizationTolerance) {
      throw ValidationError("series is not normalized (sum = " + csv::format_double(s->sum()) + ")");
    }
  }
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(a.size())) {
    throw ValidationError("label count does not match series length");
  }

  DistributionComparison c;
  c.labels = std::move(labels);
  c.series = {a, b};
  c.l1_distance = (a - b).cwiseAbs().sum();

  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double denom = std::sqrt(da.squaredNorm() * db.squaredNorm());
  if (denom > 0.0) {
    c.pearson_r = std::clamp(da.dot(db) / denom, -1.0, 1.0);
  } else {
    c.pearson_r = a == b ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  }
  return c;
}

LabeledSeries read_series_csv(std::istream& in) {
  LabeledSeries s;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split_line(line);
    if (!fields || fields->size() != 2) {
      throw FormatMismatchError("series line " + std::to_string(line_no) + ": expected 'bin_label,value'");
    }
    auto v = csv::parse_double((*fields)[1]);
    if (!v) {
      if (values.empty() && s.labels.empty()) continue;  // header
      throw FormatMismatchError("series line " + std::to_string(line_no) + ": value is not a number");
    }
    s.labels.emplace_back(csv::trim((*fields)[0]));
    values.push_back(*v);
  }
  s.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return s;
}

std::string comparison_to_json(const DistributionComparison& c) {
  nlohmann::ordered_json j;
  j["labels"] = c.labels;
  auto series = nlohmann::ordered_json::array();
  for (const auto& s : c.series) series.push_back(std::vector<double>(s.data(), s.data() + s.size()));
  j["series"] = series;
  j["l1_distance"] = c.l1_distance;
  if (std::isnan(c.pearson_r)) {
    j["pearson_r"] = nullptr;
  } else {
    j["pearson_r"] = c.pearson_r;
  }
  return j.dump(2) + "\n";
}

}  // namespace geotrips
