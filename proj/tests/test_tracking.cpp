// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldm/error.hpp"
#include "ldm/tracking.hpp"

using namespace ldm;
using tracking::DeviceRegistry;
using tracking::DeviceStatus;

TEST_CASE("location updates replace position and reject stale fixes") {
  DeviceRegistry registry;
  registry.register_device("d", DeviceKind::Vehicle);

  registry.update_location("d", geo::GeoPoint{60.0, 24.0}, 1000);
  registry.update_location("d", geo::GeoPoint{60.1, 24.1}, 2000);
  const auto device = registry.get("d");
  CHECK(device.last_position->lat == 60.1);
  CHECK(*device.last_update == 2000);

  try {
    registry.update_location("d", geo::GeoPoint{60.2, 24.2}, 1500);
    FAIL("expected StaleUpdate");
  } catch (const LdmError& e) {
    CHECK(e.code() == ErrorCode::StaleUpdate);
  }
  // Equal timestamp is also stale: strictly-greater contract.
  CHECK_THROWS_AS(registry.update_location("d", geo::GeoPoint{60, 24}, 2000),
                  LdmError);

  try {
    registry.update_location("ghost", geo::GeoPoint{60, 24}, 1);
    FAIL("expected UnknownDevice");
  } catch (const LdmError& e) {
    CHECK(e.code() == ErrorCode::UnknownDevice);
  }
}

TEST_CASE("status derivation around the offline threshold") {
  DeviceRegistry registry(10'000);
  registry.register_device("live", DeviceKind::Vehicle);
  registry.register_device("edge", DeviceKind::Vehicle);
  registry.register_device("stale", DeviceKind::Uav);
  registry.register_device("silent", DeviceKind::Uav);

  const TimestampMs now = 1'000'000;
  registry.update_location("live", geo::GeoPoint{60, 24}, now - 5'000);
  registry.update_location("edge", geo::GeoPoint{60, 24}, now - 10'000);
  registry.update_location("stale", geo::GeoPoint{60, 24}, now - 10'001);

  for (const auto& view : registry.list_devices(now)) {
    if (view.device.device_id == "live" || view.device.device_id == "edge") {
      CHECK(view.status == DeviceStatus::Live);
    } else {
      CHECK(view.status == DeviceStatus::Offline);
    }
  }
}

TEST_CASE("status is a pure function of the update log") {
  auto run = [](TimestampMs query_time) {
    DeviceRegistry registry(10'000);
    registry.register_device("d", DeviceKind::Vehicle);
    registry.update_location("d", geo::GeoPoint{60, 24}, 100);
    registry.update_location("d", geo::GeoPoint{60.5, 24.5}, 900);
    std::string out;
    for (const auto& view : registry.list_devices(query_time)) {
      out += std::string(tracking::status_name(view.status));
    }
    return out;
  };
  CHECK(run(5'000) == run(5'000));
  CHECK(run(5'000) == "live");
  CHECK(run(50'000) == "offline");
}

TEST_CASE("duplicate registration is rejected") {
  DeviceRegistry registry;
  registry.register_device("d", DeviceKind::Vehicle);
  CHECK_THROWS_AS(registry.register_device("d", DeviceKind::Uav), LdmError);
}

TEST_CASE("kind names round-trip") {
  CHECK(tracking::kind_from_name("vehicle") == DeviceKind::Vehicle);
  CHECK(tracking::kind_from_name("uav") == DeviceKind::Uav);
  CHECK_THROWS_AS(tracking::kind_from_name("submarine"), LdmError);
}
