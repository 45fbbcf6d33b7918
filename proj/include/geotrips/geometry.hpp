#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "geotrips/error.hpp"

namespace geotrips {

/// (lat, lon) in degrees. Row 0 is latitude, row 1 longitude.
template <typename Scalar>
using LatLon = Eigen::Matrix<Scalar, 2, 1>;
using GeoPoint = LatLon<double>;

/// Polygon ring vertices, one (lat, lon) row each. Implicitly closed: the first
/// vertex is not repeated at the end.
template <typename Scalar>
using RingT = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;
using PolygonRing = RingT<double>;

template <typename Scalar>
struct ZonePolygonT {
  RingT<Scalar> outer;
  std::vector<RingT<Scalar>> holes;
};
using ZonePolygon = ZonePolygonT<double>;

template <typename Scalar>
struct BoundingBoxT {
  Scalar min_lat{};
  Scalar max_lat{};
  Scalar min_lon{};
  Scalar max_lon{};

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& p, Scalar margin = Scalar(0)) const {
    return p(0) >= min_lat - margin && p(0) <= max_lat + margin && p(1) >= min_lon - margin &&
           p(1) <= max_lon + margin;
  }

  Scalar lat_extent() const { return max_lat - min_lat; }
  Scalar lon_extent() const { return max_lon - min_lon; }
};
using BoundingBox = BoundingBoxT<double>;

enum class Containment { outside, inside };

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

/// Points within this many degrees of a polygon edge count as inside.
inline constexpr double kBoundaryTolerance = 1e-12;

inline GeoPoint make_point(double lat, double lon) { return GeoPoint(lat, lon); }

template <typename Derived>
bool is_valid_point(const Eigen::MatrixBase<Derived>& p) {
  return std::isfinite(p(0)) && std::isfinite(p(1)) && p(0) >= -90 && p(0) <= 90 &&
         p(1) >= -180 && p(1) <= 180;
}

/// Great-circle distance in meters on a sphere of radius kEarthRadiusMeters.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar haversine_distance(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  constexpr Scalar kDeg = std::numbers::pi_v<Scalar> / Scalar(180);
  const Scalar lat1 = a(0) * kDeg;
  const Scalar lat2 = b(0) * kDeg;
  const Scalar sin_dlat = std::sin((lat2 - lat1) / 2);
  const Scalar sin_dlon = std::sin((b(1) - a(1)) * kDeg / 2);
  Scalar h = sin_dlat * sin_dlat + std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
  h = std::clamp(h, Scalar(0), Scalar(1));
  return Scalar(2) * Scalar(kEarthRadiusMeters) * std::asin(std::sqrt(h));
}

/// Throws InvalidGeometryError if the ring has fewer than 3 vertices, non-finite
/// coordinates, or two identical consecutive vertices (wrap-around included).
template <typename Derived>
void validate_ring(const Eigen::MatrixBase<Derived>& ring, const std::string& context = "ring") {
  const auto n = ring.rows();
  if (n < 3) {
    throw InvalidGeometryError(context + ": ring has " + std::to_string(n) +
                               " vertices, at least 3 required");
  }
  if (!ring.allFinite()) throw InvalidGeometryError(context + ": non-finite vertex");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ring.row(i) == ring.row((i + 1) % n)) {
      throw InvalidGeometryError(context + ": consecutive duplicate vertex at index " +
                                 std::to_string(i));
    }
  }
}

/// Tight bounds of the ring's vertices.
template <typename Derived>
BoundingBoxT<typename Derived::Scalar> ring_bbox(const Eigen::MatrixBase<Derived>& ring) {
  BoundingBoxT<typename Derived::Scalar> box;
  box.min_lat = ring.col(0).minCoeff();
  box.max_lat = ring.col(0).maxCoeff();
  box.min_lon = ring.col(1).minCoeff();
  box.max_lon = ring.col(1).maxCoeff();
  return box;
}

template <typename Scalar>
void validate_polygon(const ZonePolygonT<Scalar>& poly, const std::string& context = "polygon") {
  validate_ring(poly.outer, context + " outer ring");
  const auto outer_box = ring_bbox(poly.outer);
  for (std::size_t h = 0; h < poly.holes.size(); ++h) {
    validate_ring(poly.holes[h], context + " hole " + std::to_string(h));
    const auto hb = ring_bbox(poly.holes[h]);
    if (hb.min_lat < outer_box.min_lat || hb.max_lat > outer_box.max_lat ||
        hb.min_lon < outer_box.min_lon || hb.max_lon > outer_box.max_lon) {
      throw InvalidGeometryError(context + " hole " + std::to_string(h) +
                                 " extends outside the outer ring's bounding box");
    }
  }
}

/// Tight bounds of the outer ring.
template <typename Scalar>
BoundingBoxT<Scalar> bbox(const ZonePolygonT<Scalar>& poly) {
  if (poly.outer.rows() == 0) throw InvalidGeometryError("bbox of empty polygon");
  return ring_bbox(poly.outer);
}

namespace detail {

/// Squared planar distance (degrees^2) from p to segment [a, b].
template <typename Scalar>
Scalar segment_distance_sq(const LatLon<Scalar>& p, const LatLon<Scalar>& a,
                           const LatLon<Scalar>& b) {
  const LatLon<Scalar> ab = b - a;
  const Scalar len_sq = ab.squaredNorm();
  Scalar t = len_sq > Scalar(0) ? (p - a).dot(ab) / len_sq : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (a + t * ab - p).squaredNorm();
}

}  // namespace detail

/// True when p lies within `tolerance` degrees of any edge of the ring.
template <typename DerivedP, typename DerivedR>
bool on_ring_boundary(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedR>& ring,
                      typename DerivedR::Scalar tolerance = kBoundaryTolerance) {
  using Scalar = typename DerivedR::Scalar;
  const LatLon<Scalar> q = p;
  const auto n = ring.rows();
  const Scalar tol_sq = tolerance * tolerance;
  for (Eigen::Index i = 0, j = n - 1; i < n; j = i++) {
    const LatLon<Scalar> a = ring.row(j).transpose();
    const LatLon<Scalar> b = ring.row(i).transpose();
    if (detail::segment_distance_sq(q, a, b) <= tol_sq) return true;
  }
  return false;
}

/// Even-odd ray cast along +lon. Boundary points are not handled specially here.
template <typename DerivedP, typename DerivedR>
bool ray_cast_inside(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedR>& ring) {
  const auto y = p(0);
  const auto x = p(1);
  bool inside = false;
  const auto n = ring.rows();
  for (Eigen::Index i = 0, j = n - 1; i < n; j = i++) {
    const auto yi = ring(i, 0), xi = ring(i, 1);
    const auto yj = ring(j, 0), xj = ring(j, 1);
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

/// Planar (equirectangular) containment test. Points on any edge, outer or hole,
/// are inside; points strictly inside a hole are outside.
template <typename DerivedP, typename Scalar>
Containment point_in_polygon(const Eigen::MatrixBase<DerivedP>& p, const ZonePolygonT<Scalar>& poly) {
  if (poly.outer.rows() < 3) throw InvalidGeometryError("polygon outer ring has fewer than 3 vertices");
  for (const auto& hole : poly.holes) {
    if (hole.rows() < 3) throw InvalidGeometryError("polygon hole has fewer than 3 vertices");
  }
  if (on_ring_boundary(p, poly.outer)) return Containment::inside;
  for (const auto& hole : poly.holes) {
    if (on_ring_boundary(p, hole)) return Containment::inside;
  }
  if (!ray_cast_inside(p, poly.outer)) return Containment::outside;
  for (const auto& hole : poly.holes) {
    if (ray_cast_inside(p, hole)) return Containment::outside;
  }
  return Containment::inside;
}

/// Approximate distance in meters from p to the nearest edge of the polygon
/// (outer and holes), using a local equirectangular projection around p.
template <typename DerivedP, typename Scalar>
Scalar distance_to_boundary_m(const Eigen::MatrixBase<DerivedP>& p, const ZonePolygonT<Scalar>& poly) {
  constexpr Scalar kDeg = std::numbers::pi_v<Scalar> / Scalar(180);
  const Scalar m_per_deg_lat = Scalar(kEarthRadiusMeters) * kDeg;
  const Scalar m_per_deg_lon = m_per_deg_lat * std::cos(p(0) * kDeg);
  auto project = [&](Scalar lat, Scalar lon) {
    return LatLon<Scalar>((lat - p(0)) * m_per_deg_lat, (lon - p(1)) * m_per_deg_lon);
  };
  const LatLon<Scalar> origin = LatLon<Scalar>::Zero();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  auto scan = [&](const RingT<Scalar>& ring) {
    const auto n = ring.rows();
    for (Eigen::Index i = 0, j = n - 1; i < n; j = i++) {
      const auto a = project(ring(j, 0), ring(j, 1));
      const auto b = project(ring(i, 0), ring(i, 1));
      best = std::min(best, detail::segment_distance_sq(origin, a, b));
    }
  };
  scan(poly.outer);
  for (const auto& hole : poly.holes) scan(hole);
  return std::sqrt(best);
}

}  // namespace geotrips
