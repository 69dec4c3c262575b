// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

namespace ldm::geo {

// Spherical earth model; proximity-alert scale does not warrant WGS84.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// A WGS-style coordinate. alt is meters above the local reference and is
/// absent for ground-level agents.
struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
  std::optional<double> alt;
};

/// Axis-aligned pixel rectangle, origin top-left.
struct PixelBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
};

/// Vertex loop, implicitly closed (last vertex != first). Must be simple
/// once projected to the local planar frame.
struct Polygon {
  std::vector<GeoPoint> vertices;
};

void validate(const GeoPoint& p);
void validate(const PixelBox& b);

// Throws DegeneratePolygon for <3 vertices, zero projected area or
// self-intersection; ValidationError for bad vertices or spans >= 90 deg.
void validate_polygon(const Polygon& poly);

/// Great-circle distance in meters. Altitude is ignored.
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// Boundary-inclusive containment test: ray casting in an equirectangular
/// projection centered on the polygon centroid. On-the-fence counts as
/// inside, which is the fail-safe reading for no-fly zones.
bool point_in_polygon(const GeoPoint& p, const Polygon& poly);

/// Intersection over union of two pixel boxes, in [0, 1].
double iou(const PixelBox& a, const PixelBox& b);

}  // namespace ldm::geo
