// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ldm/geo.hpp"
#include "ldm/store.hpp"
#include "ldm/tracking.hpp"
#include "ldm/types.hpp"

namespace ldm::events {

enum class ZoneKind { NoFly, FieldBoundary };

/// Virtual barrier: polygon footprint plus an optional altitude band.
/// NoFly zones violate on entry; FieldBoundary zones bind specific devices
/// and violate when a bound device leaves the polygon (or its band).
struct GeofenceZone {
  std::string zone_id;
  ZoneKind kind = ZoneKind::NoFly;
  geo::Polygon polygon;
  std::optional<double> alt_min;
  std::optional<double> alt_max;
  std::set<std::string> bound_devices;  // FieldBoundary only
  std::optional<std::string> region_tag;
};

struct ProximityRule {
  double radius_m = 50.0;
  std::set<std::string> classes = {"cyclist", "pedestrian", "car"};
  // Only objects at most this old (relative to the evaluated fix) alert;
  // defaults to the HighlyDynamic TTL.
  TimestampMs freshness_ms = 2'000;
};

enum class EventKind { ProximityAlert, GeofenceViolation, GeofenceExitViolation };

struct Event {
  std::uint64_t event_id = 0;
  EventKind kind = EventKind::ProximityAlert;
  std::string target_device;
  std::string subject;  // object_id for alerts, zone_id for violations
  TimestampMs at = 0;
  std::optional<double> distance_m;  // ProximityAlert only
  geo::GeoPoint position;
};

struct EventEngineOptions {
  ProximityRule rule;
  TimestampMs debounce_window_ms = 5'000;
};

// Evaluates each accepted device fix against stored dynamic objects and the
// active zone set, and queues resulting events per subscriber. Queues are
// retained for at-least-once polling; event ids are globally monotone, so
// per-subscriber delivery order is strictly increasing.
class EventEngine {
 public:
  EventEngine(const store::ObjectStore& object_store,
              const tracking::DeviceRegistry& devices,
              EventEngineOptions options = {});

  // Throws DegeneratePolygon / ValidationError. Empty zone_id gets one
  // assigned; duplicate ids are rejected.
  std::string create_zone(GeofenceZone zone);

  std::vector<GeofenceZone> list_zones() const;

  // Emits proximity alerts and geofence (exit) violations for this fix.
  // Repeat events for the same (device, subject, kind) are suppressed
  // within the debounce window. Throws UnknownDevice.
  std::vector<Event> evaluate(const std::string& device_id,
                              const geo::GeoPoint& pos, TimestampMs at);

  // Cursor read: all queued events for the device with id > after. Re-polling
  // with the same cursor returns the same events. Throws UnknownDevice.
  std::vector<Event> poll_events(const std::string& device_id,
                                 std::uint64_t after) const;

  // Same, but blocks up to wait_ms when the result would be empty.
  std::vector<Event> poll_events_wait(const std::string& device_id,
                                      std::uint64_t after, int wait_ms);

  const EventEngineOptions& options() const { return options_; }

 private:
  struct DebounceKey {
    std::string device_id;
    EventKind kind;
    std::string subject;
    auto operator<=>(const DebounceKey&) const = default;
  };

  bool debounced(const DebounceKey& key, TimestampMs at) const;
  std::vector<Event> collect_locked(const std::string& device_id,
                                    std::uint64_t after) const;

  const store::ObjectStore& object_store_;
  const tracking::DeviceRegistry& devices_;
  EventEngineOptions options_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, GeofenceZone> zones_;
  std::map<std::string, std::vector<Event>> queues_;  // by target device
  std::map<DebounceKey, TimestampMs> last_emitted_;
  std::uint64_t next_event_id_ = 1;
  std::uint64_t next_zone_seq_ = 1;
};

std::string_view zone_kind_name(ZoneKind kind);
ZoneKind zone_kind_from_name(std::string_view name);
std::string_view event_kind_name(EventKind kind);
EventKind event_kind_from_name(std::string_view name);

}  // namespace ldm::events
