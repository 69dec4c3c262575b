// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ldm/error.hpp"
#include "ldm/geo.hpp"
#include "support/geo_oracles.hpp"

using namespace ldm;
using geo::GeoPoint;
using geo::PixelBox;
using geo::Polygon;

namespace {

using ldm::testing::winding_oracle_contains;

Polygon unit_square() { return Polygon{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}}; }

}  // namespace

TEST_CASE("haversine matches closed-form references") {
  const GeoPoint origin{0.0, 0.0};
  CHECK(geo::haversine_distance(origin, origin) == 0.0);
  // One equatorial degree: R * pi/180.
  CHECK(std::abs(geo::haversine_distance(origin, GeoPoint{0.0, 1.0}) -
                 111'195.0) < 1.0);
  // Antipodal: pi * R.
  CHECK(std::abs(geo::haversine_distance(origin, GeoPoint{0.0, 180.0}) -
                 20'015'087.0) < 1.0);
}

TEST_CASE("haversine symmetry and triangle inequality over random points") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> lat(-89.0, 89.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int i = 0; i < 2000; ++i) {
    const GeoPoint a{lat(rng), lon(rng)};
    const GeoPoint b{lat(rng), lon(rng)};
    const GeoPoint c{lat(rng), lon(rng)};
    const double ab = geo::haversine_distance(a, b);
    CHECK(ab == geo::haversine_distance(b, a));
    CHECK(ab >= 0.0);
    const double ac = geo::haversine_distance(a, c);
    const double cb = geo::haversine_distance(c, b);
    CHECK(ab <= (ac + cb) * (1.0 + 1e-6) + 1e-6);
  }
}

TEST_CASE("point_in_polygon examples") {
  const Polygon square = unit_square();
  CHECK(geo::point_in_polygon(GeoPoint{0.5, 0.5}, square));
  CHECK_FALSE(geo::point_in_polygon(GeoPoint{2.0, 2.0}, square));
  // Boundary-inclusive convention: vertices and edges count as inside.
  CHECK(geo::point_in_polygon(GeoPoint{0.0, 0.0}, square));
  CHECK(geo::point_in_polygon(GeoPoint{0.5, 0.0}, square));
  CHECK(winding_oracle_contains(GeoPoint{0.0, 0.0}, square));
}

TEST_CASE("point_in_polygon rejects degenerate polygons") {
  CHECK_THROWS_AS(
      geo::point_in_polygon(GeoPoint{0, 0}, Polygon{{{0, 0}, {1, 1}}}),
      LdmError);
  // Three collinear vertices: zero projected area.
  try {
    geo::point_in_polygon(GeoPoint{0, 0}, Polygon{{{0, 0}, {1, 1}, {2, 2}}});
    FAIL("expected DegeneratePolygon");
  } catch (const LdmError& e) {
    CHECK(e.code() == ErrorCode::DegeneratePolygon);
  }
}

TEST_CASE("validate_polygon catches self-intersection and wide spans") {
  // Bowtie.
  CHECK_THROWS_AS(
      geo::validate_polygon(Polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}),
      LdmError);
  try {
    geo::validate_polygon(Polygon{{{0, -80}, {0, 80}, {10, 0}}});
    FAIL("expected ValidationError");
  } catch (const LdmError& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
  }
  CHECK_NOTHROW(geo::validate_polygon(unit_square()));
}

TEST_CASE("point_in_polygon agrees with the winding-number oracle") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> center_lat(-60.0, 60.0);
  std::uniform_real_distribution<double> center_lon(-150.0, 150.0);
  std::uniform_real_distribution<double> radius(0.01, 2.0);
  std::uniform_int_distribution<int> vertex_count(3, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int checked = 0;
  for (int iter = 0; iter < 2000 && checked < 1500; ++iter) {
    const double clat = center_lat(rng);
    const double clon = center_lon(rng);
    const double r = radius(rng);
    const int n = vertex_count(rng);

    // Random convex polygon: sorted angles on a circle.
    std::vector<double> angles(n);
    for (auto& a : angles) a = unit(rng) * 2.0 * std::numbers::pi;
    std::sort(angles.begin(), angles.end());
    bool distinct = true;
    for (int i = 1; i < n; ++i) {
      if (angles[i] - angles[i - 1] < 0.05) distinct = false;
    }
    if (!distinct) continue;

    Polygon poly;
    for (const double a : angles) {
      poly.vertices.push_back(
          GeoPoint{clat + r * std::sin(a), clon + r * std::cos(a)});
    }
    geo::validate_polygon(poly);

    const GeoPoint probe{clat + (unit(rng) * 4.0 - 2.0) * r,
                         clon + (unit(rng) * 4.0 - 2.0) * r};
    // Skip probes razor-close to an edge, where the two boundary epsilons
    // may legitimately disagree.
    bool near_edge = false;
    for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
      const auto& a = poly.vertices[i];
      const auto& b = poly.vertices[(i + 1) % poly.vertices.size()];
      const double vx = b.lon - a.lon, vy = b.lat - a.lat;
      const double wx = probe.lon - a.lon, wy = probe.lat - a.lat;
      const double len = std::hypot(vx, vy);
      if (len == 0.0) continue;
      if (std::abs(vx * wy - vy * wx) / len < 1e-7) near_edge = true;
    }
    if (near_edge) continue;

    CHECK(geo::point_in_polygon(probe, poly) ==
          winding_oracle_contains(probe, poly));
    ++checked;
  }
  CHECK(checked >= 1000);
}

TEST_CASE("iou examples") {
  const PixelBox a{0, 0, 2, 2};
  CHECK(geo::iou(a, a) == 1.0);
  CHECK(geo::iou(PixelBox{0, 0, 1, 1}, PixelBox{5, 5, 1, 1}) == 0.0);
  // Intersection 2, union 6.
  CHECK(geo::iou(PixelBox{0, 0, 2, 2}, PixelBox{1, 0, 2, 2}) ==
        doctest::Approx(1.0 / 3.0));
}

TEST_CASE("iou properties over random boxes") {
  // Whole-pixel coordinates, as real detections carry; keeps the
  // arithmetic exact so the identity and translation properties hold
  // without tolerance.
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> coord(0, 100);
  std::uniform_int_distribution<int> size(1, 50);
  for (int i = 0; i < 2000; ++i) {
    const PixelBox a{double(coord(rng)), double(coord(rng)),
                     double(size(rng)), double(size(rng))};
    const PixelBox b{double(coord(rng)), double(coord(rng)),
                     double(size(rng)), double(size(rng))};
    const double v = geo::iou(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == geo::iou(b, a));
    CHECK(geo::iou(a, a) == 1.0);

    const double dx = coord(rng), dy = coord(rng);
    const PixelBox at{a.x + dx, a.y + dy, a.w, a.h};
    const PixelBox bt{b.x + dx, b.y + dy, b.w, b.h};
    CHECK(geo::iou(at, bt) == v);
  }
}

TEST_CASE("GeoPoint and PixelBox validation") {
  CHECK_THROWS_AS(geo::validate(GeoPoint{91.0, 0.0}), LdmError);
  CHECK_THROWS_AS(geo::validate(GeoPoint{0.0, 181.0}), LdmError);
  CHECK_THROWS_AS(geo::validate(GeoPoint{std::nan(""), 0.0}), LdmError);
  CHECK_NOTHROW(geo::validate(GeoPoint{60.17, 24.94, 12.0}));
  CHECK_THROWS_AS(geo::validate(PixelBox{0, 0, 0, 5}), LdmError);
  CHECK_THROWS_AS(geo::validate(PixelBox{-1, 0, 2, 5}), LdmError);
  CHECK_NOTHROW(geo::validate(PixelBox{3, 4, 5, 6}));
}
