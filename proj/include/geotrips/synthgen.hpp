#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "geotrips/ingest.hpp"
#include "geotrips/zoning.hpp"

namespace geotrips {

/// Hourly trip-start weights; column 0 weekday, column 1 weekend.
using TripSchedule = Eigen::Matrix<double, 24, 2>;

/// Parameters of a synthetic corpus.
///
/// Each agent lives through a series of episodes. An episode is a short stay at an
/// origin anchor, one trip, and a short stay at a destination anchor; consecutive
/// episodes are separated by more than `time_window` of silence so the only
/// displacement that can cross zones inside an episode is its trip. Anchors keep
/// `anchor_margin_m` from every zone edge so GPS noise never flips a zone label.
struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_agents = 100;
  /// When non-zero, agents are added until this many genuine tweets exist and
  /// n_agents is ignored.
  std::size_t target_tweets = 0;

  std::shared_ptr<const ZoneSet> zones;
  /// zones x zones trip weights, rows = origin, in ZoneSet declaration order.
  Eigen::MatrixXd od_weights;

  /// Discrete Pareto tweets per agent: floor(min * U^(-1/alpha)), capped at max.
  double tweets_pareto_alpha = 1.2;
  std::size_t tweets_min = 100;
  std::size_t tweets_max = 20000;

  TripSchedule trip_schedule = TripSchedule::Ones();

  double gps_noise_sigma_m = 30.0;
  /// Probability that a genuine tweet is followed by an implausible jump.
  double anomaly_rate = 0.0;
  /// Probability that a trip's destination tweet comes later than time_window.
  double unobserved_rate = 0.1;

  std::string start_date = "2014-08-01";
  std::string timezone = "UTC";
  Seconds time_window{7200};
  std::size_t recoverable_min_tweets = 100;
  double anchor_margin_m = 300.0;

  /// Throws ConfigError on any invalid field.
  void validate() const;
};

struct GroundTruthTrip {
  std::string user_id;
  std::string origin_zone;
  std::string destination_zone;
  Instant true_crossing_time{};
  /// Both endpoint tweets within time_window and the agent passes recoverable_min_tweets.
  bool recoverable = false;
};

struct SynthCorpus {
  std::vector<TweetRecord> records;  // sorted by (timestamp, user_id)
  std::vector<GroundTruthTrip> trips;
  std::size_t genuine_records = 0;
  std::size_t anomaly_records = 0;
};

/// Deterministic given the config (seed included). Throws ConfigError when the zone
/// map has fewer than two zones.
SynthCorpus generate(const SynthConfig& cfg);

/// Ground truth CSV: user_id,origin_zone,dest_zone,true_crossing_time.
void write_ground_truth_csv(std::ostream& out, const std::vector<GroundTruthTrip>& trips);

/// Default schedule: weekday peaks at 7-9 and 16-19, flatter weekend.
TripSchedule commuter_schedule();

/// Axis-aligned rectangular zones laid out on a rows x cols grid; ids "z0", "z1", ...
std::vector<Zone> grid_zones(std::size_t rows, std::size_t cols, double min_lat, double min_lon,
                             double cell_lat, double cell_lon);

}  // namespace geotrips
