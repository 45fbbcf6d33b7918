#include "geotrips/zoning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "geotrips/error.hpp"
#include "json.hpp"

namespace geotrips {

namespace {

using Json = nlohmann::json;

// Grid cells are padded by this much so boundary-tolerance hits are never missed.
constexpr double kIndexMargin = 1e-9;

PolygonRing parse_ring(const Json& coords, const std::string& context) {
  if (!coords.is_array()) throw InvalidGeometryError(context + ": ring is not an array");
  std::vector<GeoPoint> pts;
  pts.reserve(coords.size());
  for (const auto& c : coords) {
    if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) {
      throw InvalidGeometryError(context + ": position must be [lon, lat]");
    }
    pts.push_back(make_point(c[1].get<double>(), c[0].get<double>()));
  }
  if (pts.size() >= 2 && pts.front() == pts.back()) pts.pop_back();
  PolygonRing ring(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) ring.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  validate_ring(ring, context);
  return ring;
}

ZonePolygon parse_polygon(const Json& rings, const std::string& context) {
  if (!rings.is_array() || rings.empty()) throw InvalidGeometryError(context + ": polygon has no rings");
  ZonePolygon poly;
  poly.outer = parse_ring(rings[0], context + " outer ring");
  for (std::size_t h = 1; h < rings.size(); ++h) {
    poly.holes.push_back(parse_ring(rings[h], context + " hole " + std::to_string(h - 1)));
  }
  return poly;
}

std::string property_string(const Json& props, const char* key) {
  auto it = props.find(key);
  if (it == props.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  return it->dump();
}

Json ring_to_json(const PolygonRing& ring) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i <= ring.rows(); ++i) {
    const auto r = i % ring.rows();
    out.push_back({ring(r, 1), ring(r, 0)});
  }
  return out;
}

}  // namespace

ZoneSet::ZoneSet(std::vector<Zone> zones) : zones_(std::move(zones)) {
  if (zones_.empty()) throw ConfigError("no zones");
  std::set<std::string> seen;
  for (const auto& z : zones_) {
    if (z.zone_id.empty()) throw ConfigError("zone with empty zone_id");
    if (z.zone_id == ZoneLabel::kExternalId) throw ConfigError("zone_id 'EXTERNAL' is reserved");
    if (!seen.insert(z.zone_id).second) throw ConfigError("duplicate zone_id '" + z.zone_id + "'");
    if (z.polygons.empty()) throw InvalidGeometryError("zone '" + z.zone_id + "' has no polygons");
    for (std::size_t p = 0; p < z.polygons.size(); ++p) {
      validate_polygon(z.polygons[p], "zone '" + z.zone_id + "' polygon " + std::to_string(p));
    }
  }

  double max_dim = 0.0;
  bool first = true;
  for (const auto& z : zones_) {
    polygon_offset_.push_back(polygon_boxes_.size());
    for (const auto& poly : z.polygons) {
      const auto box = bbox(poly);
      polygon_boxes_.push_back(box);
      max_dim = std::max({max_dim, box.lat_extent(), box.lon_extent()});
      if (first) {
        extent_ = box;
        first = false;
      } else {
        extent_.min_lat = std::min(extent_.min_lat, box.min_lat);
        extent_.max_lat = std::max(extent_.max_lat, box.max_lat);
        extent_.min_lon = std::min(extent_.min_lon, box.min_lon);
        extent_.max_lon = std::max(extent_.max_lon, box.max_lon);
      }
    }
  }
  cell_size_ = max_dim > 0.0 ? max_dim : 1.0;
  rows_ = static_cast<std::size_t>(std::floor((extent_.lat_extent() + 2 * kIndexMargin) / cell_size_)) + 1;
  cols_ = static_cast<std::size_t>(std::floor((extent_.lon_extent() + 2 * kIndexMargin) / cell_size_)) + 1;
  cells_.assign(rows_ * cols_, {});

  auto cell_of = [&](double v, double origin, std::size_t limit) {
    const double idx = std::floor((v - origin + kIndexMargin) / cell_size_);
    return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(limit - 1)));
  };
  for (std::uint32_t zi = 0; zi < zones_.size(); ++zi) {
    for (std::uint32_t pi = 0; pi < zones_[zi].polygons.size(); ++pi) {
      const auto& box = polygon_boxes_[polygon_offset_[zi] + pi];
      const auto r0 = cell_of(box.min_lat - kIndexMargin, extent_.min_lat, rows_);
      const auto r1 = cell_of(box.max_lat + kIndexMargin, extent_.min_lat, rows_);
      const auto c0 = cell_of(box.min_lon - kIndexMargin, extent_.min_lon, cols_);
      const auto c1 = cell_of(box.max_lon + kIndexMargin, extent_.min_lon, cols_);
      for (auto r = r0; r <= r1; ++r) {
        for (auto c = c0; c <= c1; ++c) cells_[r * cols_ + c].push_back({zi, pi});
      }
    }
  }
}

const Zone* ZoneSet::find(std::string_view zone_id) const {
  for (const auto& z : zones_) {
    if (z.zone_id == zone_id) return &z;
  }
  return nullptr;
}

std::vector<std::string> ZoneSet::zone_ids() const {
  std::vector<std::string> ids;
  ids.reserve(zones_.size());
  for (const auto& z : zones_) ids.push_back(z.zone_id);
  return ids;
}

int ZoneSet::zone_index(const GeoPoint& p) const {
  if (!extent_.contains(p, kIndexMargin)) return -1;
  const auto r = static_cast<std::size_t>(
      std::clamp(std::floor((p(0) - extent_.min_lat + kIndexMargin) / cell_size_), 0.0,
                 static_cast<double>(rows_ - 1)));
  const auto c = static_cast<std::size_t>(
      std::clamp(std::floor((p(1) - extent_.min_lon + kIndexMargin) / cell_size_), 0.0,
                 static_cast<double>(cols_ - 1)));
  for (const auto& e : cells_[r * cols_ + c]) {
    if (!polygon_boxes_[polygon_offset_[e.zone] + e.polygon].contains(p, kIndexMargin)) continue;
    if (point_in_polygon(p, zones_[e.zone].polygons[e.polygon]) == Containment::inside) {
      return static_cast<int>(e.zone);
    }
  }
  return -1;
}

ZoneLabel ZoneSet::label_point(const GeoPoint& p) const {
  const int idx = zone_index(p);
  return idx < 0 ? ZoneLabel::external() : ZoneLabel(zones_[static_cast<std::size_t>(idx)].zone_id);
}

ZoneLabel ZoneSet::label_point_exhaustive(const GeoPoint& p) const {
  for (const auto& z : zones_) {
    for (const auto& poly : z.polygons) {
      if (point_in_polygon(p, poly) == Containment::inside) return ZoneLabel(z.zone_id);
    }
  }
  return ZoneLabel::external();
}

ZoneSet load_zones(std::string_view geojson) {
  Json doc = Json::parse(geojson.begin(), geojson.end(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("zones file is not valid JSON");
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw ConfigError("zones file must be a GeoJSON FeatureCollection");
  }
  const auto features = doc.find("features");
  if (features == doc.end() || !features->is_array() || features->empty()) {
    throw ConfigError("no zones");
  }

  std::vector<Zone> zones;
  std::size_t index = 0;
  for (const auto& feature : *features) {
    const std::string where = "feature " + std::to_string(index++);
    const Json props = feature.value("properties", Json::object());
    Zone zone;
    zone.zone_id = props.is_object() ? property_string(props, "zone_id") : std::string();
    if (zone.zone_id.empty()) throw ConfigError(where + ": missing zone_id property");
    zone.name = property_string(props, "name");
    if (zone.name.empty()) zone.name = zone.zone_id;
    const std::string context = where + " ('" + zone.zone_id + "')";

    const auto geom = feature.find("geometry");
    if (geom == feature.end() || !geom->is_object()) {
      throw InvalidGeometryError(context + ": missing geometry");
    }
    const std::string type = geom->value("type", "");
    const auto coords = geom->find("coordinates");
    if (coords == geom->end()) throw InvalidGeometryError(context + ": missing coordinates");
    if (type == "Polygon") {
      zone.polygons.push_back(parse_polygon(*coords, context));
    } else if (type == "MultiPolygon") {
      if (!coords->is_array() || coords->empty()) {
        throw InvalidGeometryError(context + ": empty MultiPolygon");
      }
      for (std::size_t p = 0; p < coords->size(); ++p) {
        zone.polygons.push_back(parse_polygon((*coords)[p], context + " part " + std::to_string(p)));
      }
    } else {
      throw InvalidGeometryError(context + ": unsupported geometry type '" + type + "'");
    }
    zones.push_back(std::move(zone));
  }
  return ZoneSet(std::move(zones));
}

ZoneSet load_zones_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("zones file not found: " + path.string());
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_zones(text);
}

std::string zones_to_geojson(const std::vector<Zone>& zones) {
  Json features = Json::array();
  for (const auto& z : zones) {
    Json multi = Json::array();
    for (const auto& poly : z.polygons) {
      Json rings = Json::array();
      rings.push_back(ring_to_json(poly.outer));
      for (const auto& h : poly.holes) rings.push_back(ring_to_json(h));
      multi.push_back(std::move(rings));
    }
    features.push_back({{"type", "Feature"},
                        {"properties", {{"zone_id", z.zone_id}, {"name", z.name}}},
                        {"geometry", {{"type", "MultiPolygon"}, {"coordinates", std::move(multi)}}}});
  }
  return Json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump(1);
}

}  // namespace geotrips
