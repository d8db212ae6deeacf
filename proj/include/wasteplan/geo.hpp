#pragma once

// Great-circle distances and planar point-in-polygon predicates.
//
// Distances use the haversine formula on a sphere of mean radius
// 6,371,000 m. Containment treats (lon, lat) as planar coordinates; at
// community-district scale the planar approximation is well below the
// positional noise of the source data.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wasteplan/errors.hpp"

namespace wasteplan::geo {

inline constexpr double kEarthRadiusMeters = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;  // decimal degrees, [-90, 90]
  double lon = 0.0;  // decimal degrees, [-180, 180]

  bool operator==(const GeoPoint&) const = default;
};

inline bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) &&
         p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

inline double degrees_to_radians(double deg) {
  return deg * std::numbers::pi / 180.0;
}

/// Great-circle distance in meters between two points given in decimal
/// degrees. Symmetric, non-negative, zero iff the coordinates are equal.
inline double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  if (!std::isfinite(a.lat) || !std::isfinite(a.lon) ||
      !std::isfinite(b.lat) || !std::isfinite(b.lon)) {
    throw std::invalid_argument("haversine_distance: non-finite coordinate");
  }
  const double lat_a = degrees_to_radians(a.lat);
  const double lat_b = degrees_to_radians(b.lat);
  const double half_dlat = 0.5 * degrees_to_radians(b.lat - a.lat);
  const double half_dlon = 0.5 * degrees_to_radians(b.lon - a.lon);

  const double sin_lat = std::sin(half_dlat);
  const double sin_lon = std::sin(half_dlon);
  double h = sin_lat * sin_lat + std::cos(lat_a) * std::cos(lat_b) * sin_lon * sin_lon;
  // Guard against rounding pushing the argument outside [0, 1].
  if (h > 1.0) h = 1.0;
  if (h < 0.0) h = 0.0;
  return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(h));
}

// A ring is stored without the duplicate closing vertex; closure is
// implicit. rings[0] is the outer boundary, the rest are holes.
using Ring = std::vector<GeoPoint>;

struct Polygon {
  std::vector<Ring> rings;

  const Ring& outer() const { return rings.front(); }
};

namespace detail {

// Twice the signed area of triangle (a, b, c) on the (lon, lat) plane.
inline double cross(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
  return (b.lon - a.lon) * (c.lat - a.lat) - (b.lat - a.lat) * (c.lon - a.lon);
}

inline bool between(double x, double lo, double hi) {
  return (lo <= x && x <= hi) || (hi <= x && x <= lo);
}

// True when q lies on the closed segment [a, b].
inline bool on_segment(const GeoPoint& q, const GeoPoint& a, const GeoPoint& b) {
  return cross(a, b, q) == 0.0 && between(q.lon, a.lon, b.lon) &&
         between(q.lat, a.lat, b.lat);
}

// Proper-or-touching intersection test for segments (a,b) and (c,d),
// excluding the case where they merely share an endpoint.
inline bool segments_cross(const GeoPoint& a, const GeoPoint& b,
                           const GeoPoint& c, const GeoPoint& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  // Collinear overlap or an endpoint interior to the other segment.
  if (d1 == 0 && on_segment(a, c, d) && !(a == c) && !(a == d)) return true;
  if (d2 == 0 && on_segment(b, c, d) && !(b == c) && !(b == d)) return true;
  if (d3 == 0 && on_segment(c, a, b) && !(c == a) && !(c == b)) return true;
  if (d4 == 0 && on_segment(d, a, b) && !(d == a) && !(d == b)) return true;
  return false;
}

inline std::size_t distinct_vertex_count(const Ring& ring) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) {
      if (ring[i] == ring[j]) { dup = true; break; }
    }
    if (!dup) ++n;
  }
  return n;
}

}  // namespace detail

/// True when p lies on an edge of the ring (closure implicit).
inline bool point_on_ring(const GeoPoint& p, const Ring& ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (detail::on_segment(p, ring[i], ring[(i + 1) % n])) return true;
  }
  return false;
}

/// Even-odd ray-casting containment for a single ring. Boundary points are
/// resolved separately by callers; this is the open-interior test.
inline bool point_in_ring(const GeoPoint& p, const Ring& ring) {
  const std::size_t n = ring.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

/// Validates ring shape: at least 3 distinct vertices, and for the outer
/// ring no self-intersection. Throws data_error on violation.
inline void validate_polygon(const Polygon& poly) {
  if (poly.rings.empty()) {
    throw data_error("polygon has no rings");
  }
  for (const Ring& ring : poly.rings) {
    if (detail::distinct_vertex_count(ring) < 3) {
      throw data_error("degenerate ring: fewer than 3 distinct vertices");
    }
  }
  // Self-intersection check on the outer ring only; O(n^2) over edges.
  const Ring& outer = poly.outer();
  const std::size_t n = outer.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = outer[i];
    const GeoPoint& b = outer[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip edges adjacent to edge i (they legitimately share a vertex).
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      const GeoPoint& c = outer[j];
      const GeoPoint& d = outer[(j + 1) % n];
      if (detail::segments_cross(a, b, c, d)) {
        throw data_error("self-intersecting outer ring");
      }
    }
  }
}

/// True iff p is inside the outer ring and not inside any hole.
/// Points on the outer ring edge count as inside; points on a hole edge
/// also count as inside (they are not interior to the hole).
inline bool point_in_polygon(const GeoPoint& p, const Polygon& poly) {
  if (poly.rings.empty()) {
    throw std::invalid_argument("point_in_polygon: polygon has no rings");
  }
  for (const Ring& ring : poly.rings) {
    if (ring.size() < 3) {
      throw std::invalid_argument("point_in_polygon: degenerate ring");
    }
  }
  if (point_on_ring(p, poly.outer())) return true;
  if (!point_in_ring(p, poly.outer())) return false;
  for (std::size_t i = 1; i < poly.rings.size(); ++i) {
    if (point_on_ring(p, poly.rings[i])) return true;  // hole boundary
    if (point_in_ring(p, poly.rings[i])) return false; // hole interior
  }
  return true;
}

}  // namespace wasteplan::geo
