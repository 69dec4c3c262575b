// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ldm/error.hpp"

namespace ldm::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Below this projected shoelace area (square degrees) a polygon is treated
// as having no interior at all.
constexpr double kAreaEps = 1e-12;

// Distance tolerance (degrees) for the point-on-edge boundary test.
constexpr double kEdgeEps = 1e-9;

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

GeoPoint centroid_of(const Polygon& poly) {
  GeoPoint c;
  for (const auto& v : poly.vertices) {
    c.lat += v.lat;
    c.lon += v.lon;
  }
  c.lat /= static_cast<double>(poly.vertices.size());
  c.lon /= static_cast<double>(poly.vertices.size());
  return c;
}

PlanarPoint project(const GeoPoint& p, const GeoPoint& center) {
  return {(p.lon - center.lon) * std::cos(center.lat * kDegToRad),
          p.lat - center.lat};
}

double shoelace_area(const std::vector<PlanarPoint>& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % ring.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

double point_segment_distance(const PlanarPoint& p, const PlanarPoint& a,
                              const PlanarPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  const double px = a.x + t * dx - p.x;
  const double py = a.y + t * dy - p.y;
  return std::hypot(px, py);
}

int orientation(const PlanarPoint& a, const PlanarPoint& b,
                const PlanarPoint& c) {
  const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (v > kAreaEps) return 1;
  if (v < -kAreaEps) return -1;
  return 0;
}

bool on_segment_collinear(const PlanarPoint& a, const PlanarPoint& b,
                          const PlanarPoint& p) {
  return std::min(a.x, b.x) - kEdgeEps <= p.x &&
         p.x <= std::max(a.x, b.x) + kEdgeEps &&
         std::min(a.y, b.y) - kEdgeEps <= p.y &&
         p.y <= std::max(a.y, b.y) + kEdgeEps;
}

bool segments_intersect(const PlanarPoint& p1, const PlanarPoint& p2,
                        const PlanarPoint& q1, const PlanarPoint& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment_collinear(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment_collinear(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment_collinear(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment_collinear(q1, q2, p2)) return true;
  return false;
}

std::vector<PlanarPoint> project_ring(const Polygon& poly) {
  const GeoPoint center = centroid_of(poly);
  std::vector<PlanarPoint> ring;
  ring.reserve(poly.vertices.size());
  for (const auto& v : poly.vertices) ring.push_back(project(v, center));
  return ring;
}

}  // namespace

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) {
    fail(ErrorCode::ValidationError, "lat/lon must be finite");
  }
  if (p.lat < -90.0 || p.lat > 90.0) {
    fail(ErrorCode::ValidationError,
         "lat out of range: " + std::to_string(p.lat));
  }
  if (p.lon < -180.0 || p.lon > 180.0) {
    fail(ErrorCode::ValidationError,
         "lon out of range: " + std::to_string(p.lon));
  }
  if (p.alt && !std::isfinite(*p.alt)) {
    fail(ErrorCode::ValidationError, "alt must be finite");
  }
}

void validate(const PixelBox& b) {
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
      !std::isfinite(b.h)) {
    fail(ErrorCode::ValidationError, "box coordinates must be finite");
  }
  if (b.x < 0.0 || b.y < 0.0) {
    fail(ErrorCode::ValidationError, "box position must be non-negative");
  }
  if (b.w <= 0.0 || b.h <= 0.0) {
    fail(ErrorCode::ValidationError, "box width/height must be positive");
  }
}

void validate_polygon(const Polygon& poly) {
  if (poly.vertices.size() < 3) {
    fail(ErrorCode::DegeneratePolygon, "polygon needs at least 3 vertices");
  }
  double min_lat = 90.0, max_lat = -90.0, min_lon = 180.0, max_lon = -180.0;
  for (const auto& v : poly.vertices) {
    validate(v);
    min_lat = std::min(min_lat, v.lat);
    max_lat = std::max(max_lat, v.lat);
    min_lon = std::min(min_lon, v.lon);
    max_lon = std::max(max_lon, v.lon);
  }
  // The local-planar assumption breaks down for hemispheric zones; reject.
  if (max_lat - min_lat >= 90.0 || max_lon - min_lon >= 90.0) {
    fail(ErrorCode::ValidationError, "polygon spans 90 degrees or more");
  }

  const auto ring = project_ring(poly);
  if (shoelace_area(ring) < kAreaEps) {
    fail(ErrorCode::DegeneratePolygon, "polygon has zero projected area");
  }
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Edges sharing a vertex are allowed to touch there.
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(ring[i], ring[(i + 1) % n], ring[j],
                             ring[(j + 1) % n])) {
        fail(ErrorCode::DegeneratePolygon, "polygon is self-intersecting");
      }
    }
  }
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = (b.lat - a.lat) * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

bool point_in_polygon(const GeoPoint& p, const Polygon& poly) {
  if (poly.vertices.size() < 3) {
    fail(ErrorCode::DegeneratePolygon, "polygon needs at least 3 vertices");
  }
  const GeoPoint center = centroid_of(poly);
  std::vector<PlanarPoint> ring;
  ring.reserve(poly.vertices.size());
  for (const auto& v : poly.vertices) ring.push_back(project(v, center));
  if (shoelace_area(ring) < kAreaEps) {
    fail(ErrorCode::DegeneratePolygon, "polygon has zero projected area");
  }
  const PlanarPoint q = project(p, center);

  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(q, ring[i], ring[(i + 1) % n]) <= kEdgeEps) {
      return true;
    }
  }

  // Even-odd crossing count against a horizontal ray to +x.
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& vi = ring[i];
    const auto& vj = ring[j];
    if ((vi.y > q.y) != (vj.y > q.y)) {
      const double x_cross = vi.x + (q.y - vi.y) * (vj.x - vi.x) / (vj.y - vi.y);
      if (q.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

double iou(const PixelBox& a, const PixelBox& b) {
  const double ix = std::max(
      0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(
      0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

}  // namespace ldm::geo
