#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "geotrips/geometry.hpp"

namespace geotrips {

/// Zone id of a point, or EXTERNAL when the point is in no zone.
class ZoneLabel {
 public:
  static constexpr std::string_view kExternalId = "EXTERNAL";

  ZoneLabel() : id_(kExternalId) {}
  explicit ZoneLabel(std::string zone_id) : id_(std::move(zone_id)) {}

  static ZoneLabel external() { return ZoneLabel(); }

  const std::string& id() const { return id_; }
  bool is_external() const { return id_ == kExternalId; }

  friend bool operator==(const ZoneLabel&, const ZoneLabel&) = default;
  friend auto operator<=>(const ZoneLabel&, const ZoneLabel&) = default;

 private:
  std::string id_;
};

struct Zone {
  std::string zone_id;
  std::string name;
  std::vector<ZonePolygon> polygons;
};

/// Immutable collection of zones with a uniform-grid bounding-box index.
class ZoneSet {
 public:
  /// Validates every polygon and builds the index. Throws ConfigError on an empty
  /// set, a duplicate or reserved zone_id, and InvalidGeometryError on bad rings.
  explicit ZoneSet(std::vector<Zone> zones);

  const std::vector<Zone>& zones() const { return zones_; }
  std::size_t size() const { return zones_.size(); }
  const Zone* find(std::string_view zone_id) const;
  std::vector<std::string> zone_ids() const;

  /// First zone in declaration order containing p, else EXTERNAL.
  ZoneLabel label_point(const GeoPoint& p) const;

  /// Same answer as label_point, without the index. Kept for verification.
  ZoneLabel label_point_exhaustive(const GeoPoint& p) const;

  /// Declaration-order index of the matching zone, or -1.
  int zone_index(const GeoPoint& p) const;

  double cell_size() const { return cell_size_; }
  const BoundingBox& extent() const { return extent_; }

 private:
  struct Entry {
    std::uint32_t zone;
    std::uint32_t polygon;
  };

  std::vector<Zone> zones_;
  std::vector<BoundingBox> polygon_boxes_;  // flattened per (zone, polygon)
  std::vector<std::size_t> polygon_offset_;  // zone -> first index into polygon_boxes_
  BoundingBox extent_;
  double cell_size_ = 1.0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::vector<Entry>> cells_;  // row-major, entries sorted by zone
};

/// Loads a GeoJSON FeatureCollection of Polygon / MultiPolygon features carrying
/// `zone_id` and `name` properties. Coordinates are [lon, lat].
ZoneSet load_zones(std::string_view geojson);
ZoneSet load_zones_file(const std::filesystem::path& path);

/// Serializes zones back to a GeoJSON FeatureCollection.
std::string zones_to_geojson(const std::vector<Zone>& zones);

}  // namespace geotrips
