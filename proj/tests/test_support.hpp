#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "geotrips/geometry.hpp"
#include "geotrips/synthgen.hpp"
#include "geotrips/zoning.hpp"

namespace testing {

namespace fs = std::filesystem;

/// Fresh empty directory under the system temp dir.
inline fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("geotrips_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Spherical law of cosines; independent of the haversine formulation.
inline double law_of_cosines_distance(double lat1, double lon1, double lat2, double lon2) {
  const double k = std::numbers::pi / 180.0;
  const double c = std::sin(lat1 * k) * std::sin(lat2 * k) +
                   std::cos(lat1 * k) * std::cos(lat2 * k) * std::cos((lon2 - lon1) * k);
  return geotrips::kEarthRadiusMeters * std::acos(std::clamp(c, -1.0, 1.0));
}

/// Winding number of a closed ring around (lat, lon), summing signed angles.
inline int winding_number(const geotrips::PolygonRing& ring, double lat, double lon) {
  double total = 0.0;
  const auto n = ring.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = (i + 1) % n;
    const double a = std::atan2(ring(i, 0) - lat, ring(i, 1) - lon);
    const double b = std::atan2(ring(j, 0) - lat, ring(j, 1) - lon);
    double d = b - a;
    while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2 * std::numbers::pi;
    total += d;
  }
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

/// Brute-force distance (degrees) from a point to the nearest ring edge.
inline double edge_distance_deg(const geotrips::PolygonRing& ring, double lat, double lon) {
  double best = std::numeric_limits<double>::infinity();
  const auto n = ring.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = (i + 1) % n;
    const double ax = ring(i, 1), ay = ring(i, 0), bx = ring(j, 1), by = ring(j, 0);
    const double dx = bx - ax, dy = by - ay;
    double t = ((lon - ax) * dx + (lat - ay) * dy) / (dx * dx + dy * dy);
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(ax + t * dx - lon, ay + t * dy - lat));
  }
  return best;
}

/// Random simple (star-shaped) polygon: sorted angles, random radii.
inline geotrips::PolygonRing random_star_polygon(std::mt19937_64& rng, int vertices, double center_lat,
                                                 double center_lon, double r_min, double r_max) {
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::vector<double> angles(static_cast<std::size_t>(vertices));
  for (auto& a : angles) a = angle(rng);
  std::sort(angles.begin(), angles.end());
  geotrips::PolygonRing ring(vertices, 2);
  for (int i = 0; i < vertices; ++i) {
    const double r = radius(rng);
    ring(i, 0) = center_lat + r * std::sin(angles[static_cast<std::size_t>(i)]);
    ring(i, 1) = center_lon + r * std::cos(angles[static_cast<std::size_t>(i)]);
  }
  return ring;
}

inline geotrips::ZonePolygon polygon_from(std::initializer_list<std::pair<double, double>> latlon) {
  geotrips::ZonePolygon poly;
  poly.outer.resize(static_cast<Eigen::Index>(latlon.size()), 2);
  Eigen::Index i = 0;
  for (const auto& [lat, lon] : latlon) {
    poly.outer(i, 0) = lat;
    poly.outer(i, 1) = lon;
    ++i;
  }
  return poly;
}

inline geotrips::Zone zone_from(std::string id, geotrips::ZonePolygon poly) {
  geotrips::Zone z;
  z.zone_id = id;
  z.name = id;
  z.polygons.push_back(std::move(poly));
  return z;
}

/// Coarse hand-drawn outlines of Manhattan and its six neighboring counties.
/// Not survey-accurate; adjacent outlines do not overlap.
inline std::vector<geotrips::Zone> nyc_seven_counties() {
  using testing::polygon_from;
  return {
      zone_from("manhattan", polygon_from({{40.700, -74.020}, {40.710, -73.975}, {40.800, -73.930},
                                           {40.875, -73.910}, {40.878, -73.928}, {40.760, -74.010}})),
      zone_from("bronx", polygon_from({{40.800, -73.920}, {40.790, -73.830}, {40.815, -73.780},
                                       {40.900, -73.770}, {40.915, -73.915}, {40.880, -73.905}})),
      zone_from("queens", polygon_from({{40.740, -73.960}, {40.780, -73.920}, {40.785, -73.830},
                                        {40.790, -73.700}, {40.600, -73.730}, {40.640, -73.870}})),
      zone_from("kings", polygon_from({{40.700, -74.000}, {40.735, -73.962}, {40.635, -73.875},
                                       {40.570, -73.880}, {40.570, -74.040}, {40.640, -74.040}})),
      zone_from("richmond", polygon_from({{40.650, -74.070}, {40.640, -74.050}, {40.560, -74.060},
                                          {40.495, -74.250}, {40.560, -74.255}, {40.645, -74.185}})),
      zone_from("hudson", polygon_from({{40.660, -74.150}, {40.680, -74.040}, {40.750, -74.025},
                                        {40.790, -74.005}, {40.800, -74.060}, {40.720, -74.150}})),
      zone_from("bergen", polygon_from({{40.800, -74.100}, {40.805, -74.000}, {40.880, -73.950},
                                        {41.000, -73.900}, {41.050, -74.050}, {40.950, -74.250}})),
  };
}

/// 2 x 2 grid of 0.1 x 0.1 degree zones near New York: z0..z3.
inline std::vector<geotrips::Zone> four_grid_zones() { return geotrips::grid_zones(2, 2, 40.6, -74.1, 0.1, 0.1); }

/// SynthConfig over `zones` with uniform off-diagonal OD and default parameters.
inline geotrips::SynthConfig synth_config(std::shared_ptr<const geotrips::ZoneSet> zones, std::uint64_t seed) {
  geotrips::SynthConfig cfg;
  cfg.seed = seed;
  const auto n = static_cast<Eigen::Index>(zones->size());
  cfg.od_weights = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n * (n - 1)));
  cfg.od_weights.diagonal().setZero();
  cfg.zones = std::move(zones);
  cfg.trip_schedule = geotrips::commuter_schedule();
  return cfg;
}

}  // namespace testing
