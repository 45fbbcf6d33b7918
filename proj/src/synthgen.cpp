#include "geotrips/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "absl/time/civil_time.h"
#include "geotrips/csv.hpp"
#include "geotrips/error.hpp"

namespace geotrips {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kMetersPerDegLat = kEarthRadiusMeters * kDegToRad;
constexpr double kMinIntraAnchorSeparation = 1000.0;  // m
constexpr int kMaxAnchorAttempts = 20000;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

bool bernoulli(Rng& rng, double p) { return p > 0.0 && uniform(rng, 0.0, 1.0) < p; }

class Generator {
 public:
  explicit Generator(const SynthConfig& cfg)
      : cfg_(cfg), zones_(*cfg.zones), rng_(cfg.seed), tz_(TimeZone::load(cfg.timezone)) {
    const auto& ext = zones_.extent();
    mean_lat_ = 0.5 * (ext.min_lat + ext.max_lat);
    meters_per_deg_lon_ = kMetersPerDegLat * std::cos(mean_lat_ * kDegToRad);

    const auto n = static_cast<Eigen::Index>(zones_.size());
    std::vector<double> flat;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) flat.push_back(cfg.od_weights(i, j));
    }
    od_dist_ = std::discrete_distribution<std::size_t>(flat.begin(), flat.end());
    for (int c = 0; c < 2; ++c) {
      std::vector<double> w(24);
      for (int h = 0; h < 24; ++h) w[static_cast<std::size_t>(h)] = cfg.trip_schedule(h, c);
      hour_dist_[c] = std::discrete_distribution<int>(w.begin(), w.end());
    }

    absl::CivilDay day;
    if (!absl::ParseCivilTime(cfg.start_date, &day)) {
      throw ConfigError("start_date must be YYYY-MM-DD, got '" + cfg.start_date + "'");
    }
    cursor_ = to_instant(absl::CivilSecond(day));
  }

  SynthCorpus run() {
    SynthCorpus corpus;
    std::size_t produced = 0;
    for (std::size_t agent = 0;; ++agent) {
      if (cfg_.target_tweets == 0 && agent >= cfg_.n_agents) break;
      if (cfg_.target_tweets != 0 && produced >= cfg_.target_tweets) break;
      std::size_t budget = draw_budget();
      if (cfg_.target_tweets != 0) budget = std::min(budget, cfg_.target_tweets - produced);
      produced += budget;
      simulate_agent(agent, budget, corpus);
    }
    std::stable_sort(corpus.records.begin(), corpus.records.end(), [](const TweetRecord& a, const TweetRecord& b) {
      if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
      return a.user_id < b.user_id;
    });
    return corpus;
  }

 private:
  struct PendingTrip {
    std::size_t origin;
    std::size_t destination;
    Instant crossing;
    Instant last_origin_tweet;
    Instant first_destination_tweet;
  };

  Instant to_instant(absl::CivilSecond cs) const {
    return from_unix_seconds(absl::ToUnixSeconds(absl::FromCivil(cs, tz_.absl_zone())));
  }

  absl::CivilDay civil_day(Instant t) const {
    return absl::ToCivilDay(absl::FromUnixSeconds(to_unix_seconds(t)), tz_.absl_zone());
  }

  std::size_t draw_budget() {
    const double u = 1.0 - uniform(rng_, 0.0, 1.0);  // (0, 1]
    const double raw = static_cast<double>(cfg_.tweets_min) * std::pow(u, -1.0 / cfg_.tweets_pareto_alpha);
    return static_cast<std::size_t>(std::min(std::floor(raw), static_cast<double>(cfg_.tweets_max)));
  }

  GeoPoint draw_anchor(std::size_t zone_index) {
    const auto& zone = zones_.zones()[zone_index];
    BoundingBox box = bbox(zone.polygons.front());
    for (const auto& poly : zone.polygons) {
      const auto b = bbox(poly);
      box.min_lat = std::min(box.min_lat, b.min_lat);
      box.max_lat = std::max(box.max_lat, b.max_lat);
      box.min_lon = std::min(box.min_lon, b.min_lon);
      box.max_lon = std::max(box.max_lon, b.max_lon);
    }
    for (int attempt = 0; attempt < kMaxAnchorAttempts; ++attempt) {
      const GeoPoint p = make_point(uniform(rng_, box.min_lat, box.max_lat), uniform(rng_, box.min_lon, box.max_lon));
      if (zones_.zone_index(p) != static_cast<int>(zone_index)) continue;
      bool clear = true;
      for (const auto& z : zones_.zones()) {
        for (const auto& poly : z.polygons) {
          if (distance_to_boundary_m(p, poly) < cfg_.anchor_margin_m) {
            clear = false;
            break;
          }
        }
        if (!clear) break;
      }
      if (clear) return p;
    }
    throw ConfigError("zone '" + zone.zone_id + "' has no interior point " +
                      std::to_string(cfg_.anchor_margin_m) + " m from every zone edge");
  }

  GeoPoint jitter(const GeoPoint& anchor) {
    std::normal_distribution<double> noise(0.0, cfg_.gps_noise_sigma_m);
    const double north = cfg_.gps_noise_sigma_m > 0.0 ? noise(rng_) : 0.0;
    const double east = cfg_.gps_noise_sigma_m > 0.0 ? noise(rng_) : 0.0;
    return make_point(anchor(0) + north / kMetersPerDegLat, anchor(1) + east / meters_per_deg_lon_);
  }

  GeoPoint far_jump(const GeoPoint& from) {
    const double dist = uniform(rng_, 30'000.0, 80'000.0);
    const double bearing = uniform(rng_, 0.0, 2.0 * std::numbers::pi);
    const double lat = std::clamp(from(0) + dist * std::cos(bearing) / kMetersPerDegLat, -89.9, 89.9);
    double lon = from(1) + dist * std::sin(bearing) / meters_per_deg_lon_;
    if (lon > 180.0) lon -= 360.0;
    if (lon < -180.0) lon += 360.0;
    return make_point(lat, lon);
  }

  void emit(std::vector<TweetRecord>& out, const std::string& user, const GeoPoint& anchor, Instant t,
            std::size_t& anomalies) {
    TweetRecord rec;
    rec.user_id = user;
    rec.position = jitter(anchor);
    rec.timestamp = t;
    out.push_back(rec);
    if (bernoulli(rng_, cfg_.anomaly_rate)) {
      TweetRecord jump;
      jump.user_id = user;
      jump.position = far_jump(rec.position);
      jump.timestamp = t + Seconds{uniform_int(rng_, 20, 90)};
      out.push_back(std::move(jump));
      ++anomalies;
    }
  }

  void simulate_agent(std::size_t agent, std::size_t budget, SynthCorpus& corpus) {
    const std::string user = std::to_string(100000000 + agent);
    const std::size_t nz = zones_.size();

    std::vector<std::array<GeoPoint, 2>> anchors(nz);
    for (std::size_t z = 0; z < nz; ++z) {
      anchors[z][0] = draw_anchor(z);
      for (int tries = 0;; ++tries) {
        anchors[z][1] = draw_anchor(z);
        if (haversine_distance(anchors[z][0], anchors[z][1]) >= kMinIntraAnchorSeparation) break;
        if (tries > 200) throw ConfigError("zone '" + zones_.zones()[z].zone_id + "' too small for two anchors");
      }
    }

    std::vector<TweetRecord> records;
    std::vector<PendingTrip> trips;
    std::size_t anomalies = 0;
    Instant cursor = cursor_;
    std::size_t remaining = budget;

    while (remaining > 0) {
      if (remaining == 1) {
        emit(records, user, anchors[0][0], cursor + Seconds{uniform_int(rng_, 0, 3600)}, anomalies);
        break;
      }
      const std::size_t cell = od_dist_(rng_);
      const std::size_t o = cell / nz;
      const std::size_t d = cell % nz;
      const int oa = static_cast<int>(uniform_int(rng_, 0, 1));
      const int da = o == d ? 1 - oa : static_cast<int>(uniform_int(rng_, 0, 1));
      const GeoPoint& from = anchors[o][static_cast<std::size_t>(oa)];
      const GeoPoint& to = anchors[d][static_cast<std::size_t>(da)];

      std::size_t k_origin = static_cast<std::size_t>(uniform_int(rng_, 1, 3));
      std::size_t k_dest = static_cast<std::size_t>(uniform_int(rng_, 1, 3));
      k_origin = std::min(k_origin, remaining - 1);
      k_dest = std::min(k_dest, remaining - k_origin);

      const double dist = haversine_distance(from, to);
      const Seconds travel{std::max<std::int64_t>(300, static_cast<std::int64_t>(dist / uniform(rng_, 8.0, 20.0)))};

      std::vector<Seconds> origin_offsets(k_origin);  // before departure
      origin_offsets[0] = Seconds{uniform_int(rng_, 60, 900)};
      for (std::size_t i = 1; i < k_origin; ++i) origin_offsets[i] = origin_offsets[i - 1] + Seconds{uniform_int(rng_, 300, 2400)};
      const bool observed = !bernoulli(rng_, cfg_.unobserved_rate);
      std::vector<Seconds> dest_offsets(k_dest);  // after arrival
      dest_offsets[0] = observed ? Seconds{uniform_int(rng_, 60, 900)}
                                 : cfg_.time_window + Seconds{uniform_int(rng_, 600, 7200)};
      for (std::size_t i = 1; i < k_dest; ++i) dest_offsets[i] = dest_offsets[i - 1] + Seconds{uniform_int(rng_, 300, 2400)};

      // Place the crossing on the first day (from the cursor's day on) where the
      // episode's first tweet does not precede the cursor.
      absl::CivilDay day = civil_day(cursor);
      Instant crossing;
      for (;;) {
        const auto wd = absl::GetWeekday(day);
        const int column = (wd == absl::Weekday::saturday || wd == absl::Weekday::sunday) ? 1 : 0;
        const int hour = hour_dist_[column](rng_);
        const absl::CivilSecond cs(day.year(), day.month(), day.day(), hour,
                                   static_cast<int>(uniform_int(rng_, 0, 59)),
                                   static_cast<int>(uniform_int(rng_, 0, 59)));
        crossing = to_instant(cs);
        if (crossing - travel / 2 - origin_offsets.back() >= cursor) break;
        ++day;
      }
      const Instant departure = crossing - travel / 2;
      const Instant arrival = departure + travel;

      for (std::size_t i = k_origin; i-- > 0;) emit(records, user, from, departure - origin_offsets[i], anomalies);
      for (std::size_t i = 0; i < k_dest; ++i) emit(records, user, to, arrival + dest_offsets[i], anomalies);
      trips.push_back({o, d, crossing, departure - origin_offsets[0], arrival + dest_offsets[0]});

      remaining -= k_origin + k_dest;
      cursor = arrival + dest_offsets.back() + cfg_.time_window + Seconds{uniform_int(rng_, 3600, 6 * 3600)};
    }

    const bool active = records.size() >= cfg_.recoverable_min_tweets;
    for (const auto& t : trips) {
      GroundTruthTrip g;
      g.user_id = user;
      g.origin_zone = zones_.zones()[t.origin].zone_id;
      g.destination_zone = zones_.zones()[t.destination].zone_id;
      g.true_crossing_time = t.crossing;
      g.recoverable = active && (t.first_destination_tweet - t.last_origin_tweet) <= cfg_.time_window;
      corpus.trips.push_back(std::move(g));
    }
    corpus.genuine_records += records.size() - anomalies;
    corpus.anomaly_records += anomalies;
    for (auto& r : records) corpus.records.push_back(std::move(r));
  }

  const SynthConfig& cfg_;
  const ZoneSet& zones_;
  Rng rng_;
  TimeZone tz_;
  double mean_lat_ = 0.0;
  double meters_per_deg_lon_ = 0.0;
  std::discrete_distribution<std::size_t> od_dist_;
  std::discrete_distribution<int> hour_dist_[2];
  Instant cursor_{};
};

}  // namespace

void SynthConfig::validate() const {
  if (!zones) throw ConfigError("synth: zone map required");
  if (zones->size() < 2) throw ConfigError("synth: zone map needs at least 2 zones for inter-zone trips");
  const auto n = static_cast<Eigen::Index>(zones->size());
  if (od_weights.rows() != n || od_weights.cols() != n) {
    throw ConfigError("synth: od_weights must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if ((od_weights.array() < 0.0).any() || !od_weights.allFinite()) throw ConfigError("synth: od_weights must be non-negative");
  if (std::abs(od_weights.sum() - 1.0) > 1e-6) throw ConfigError("synth: od_weights must sum to 1");
  if ((trip_schedule.array() < 0.0).any() || !trip_schedule.allFinite() || trip_schedule.col(0).sum() <= 0.0 ||
      trip_schedule.col(1).sum() <= 0.0) {
    throw ConfigError("synth: trip_schedule columns must be non-negative with a positive sum");
  }
  if (!(tweets_pareto_alpha > 0.0)) throw ConfigError("synth: tweets_pareto_alpha must be positive");
  if (tweets_min == 0 || tweets_max < tweets_min) throw ConfigError("synth: need 0 < tweets_min <= tweets_max");
  if (target_tweets == 0 && n_agents == 0) throw ConfigError("synth: n_agents or target_tweets must be positive");
  if (!(gps_noise_sigma_m >= 0.0)) throw ConfigError("synth: gps_noise_sigma_m must be non-negative");
  if (!(anomaly_rate >= 0.0 && anomaly_rate <= 1.0)) throw ConfigError("synth: anomaly_rate must be in [0, 1]");
  if (!(unobserved_rate >= 0.0 && unobserved_rate <= 1.0)) throw ConfigError("synth: unobserved_rate must be in [0, 1]");
  if (time_window.count() <= 0) throw ConfigError("synth: time_window must be positive");
  if (!(anchor_margin_m >= 0.0)) throw ConfigError("synth: anchor_margin_m must be non-negative");
}

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();
  return Generator(cfg).run();
}

void write_ground_truth_csv(std::ostream& out, const std::vector<GroundTruthTrip>& trips) {
  out << "user_id,origin_zone,dest_zone,true_crossing_time\n";
  for (const auto& t : trips) {
    out << csv::quote(t.user_id) << ',' << csv::quote(t.origin_zone) << ',' << csv::quote(t.destination_zone)
        << ',' << format_iso8601(t.true_crossing_time) << '\n';
  }
}

TripSchedule commuter_schedule() {
  TripSchedule s = TripSchedule::Ones();
  for (int h : {7, 8, 9}) s(h, 0) = 10.0;
  for (int h : {16, 17, 18, 19}) s(h, 0) = 8.0;
  for (int h = 10; h <= 20; ++h) s(h, 1) = 3.0;
  return s;
}

std::vector<Zone> grid_zones(std::size_t rows, std::size_t cols, double min_lat, double min_lon, double cell_lat,
                             double cell_lon) {
  std::vector<Zone> zones;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double lat0 = min_lat + static_cast<double>(r) * cell_lat;
      const double lon0 = min_lon + static_cast<double>(c) * cell_lon;
      ZonePolygon poly;
      poly.outer.resize(4, 2);
      poly.outer << lat0, lon0, lat0, lon0 + cell_lon, lat0 + cell_lat, lon0 + cell_lon, lat0 + cell_lat, lon0;
      Zone z;
      z.zone_id = "z" + std::to_string(zones.size());
      z.name = "Zone " + std::to_string(zones.size());
      z.polygons.push_back(std::move(poly));
      zones.push_back(std::move(z));
    }
  }
  return zones;
}

}  // namespace geotrips
