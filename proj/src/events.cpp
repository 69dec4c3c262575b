// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/events.hpp"

#include <chrono>
#include <string>

#include "ldm/error.hpp"

namespace ldm::events {

std::string_view zone_kind_name(ZoneKind kind) {
  return kind == ZoneKind::NoFly ? "no_fly" : "field_boundary";
}

ZoneKind zone_kind_from_name(std::string_view name) {
  if (name == "no_fly") return ZoneKind::NoFly;
  if (name == "field_boundary") return ZoneKind::FieldBoundary;
  fail(ErrorCode::ValidationError, "unknown zone kind: " + std::string(name));
}

std::string_view event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::ProximityAlert: return "proximity_alert";
    case EventKind::GeofenceViolation: return "geofence_violation";
    case EventKind::GeofenceExitViolation: return "geofence_exit_violation";
  }
  return "proximity_alert";
}

EventKind event_kind_from_name(std::string_view name) {
  if (name == "proximity_alert") return EventKind::ProximityAlert;
  if (name == "geofence_violation") return EventKind::GeofenceViolation;
  if (name == "geofence_exit_violation") return EventKind::GeofenceExitViolation;
  fail(ErrorCode::ValidationError, "unknown event kind: " + std::string(name));
}

namespace {

// A zone (or object) tagged with a region is visible only to devices in
// that region; untagged ones are visible everywhere.
bool region_visible(const std::optional<std::string>& tag,
                    const std::optional<std::string>& device_region) {
  return !tag || (device_region && *device_region == *tag);
}

bool altitude_ok(const geo::GeoPoint& pos, const GeofenceZone& zone) {
  // The band only constrains fixes that actually carry an altitude.
  if (!pos.alt || (!zone.alt_min && !zone.alt_max)) return true;
  if (zone.alt_min && *pos.alt < *zone.alt_min) return false;
  if (zone.alt_max && *pos.alt > *zone.alt_max) return false;
  return true;
}

}  // namespace

EventEngine::EventEngine(const store::ObjectStore& object_store,
                         const tracking::DeviceRegistry& devices,
                         EventEngineOptions options)
    : object_store_(object_store),
      devices_(devices),
      options_(std::move(options)) {
  if (options_.rule.radius_m <= 0.0) {
    fail(ErrorCode::ValidationError, "proximity radius must be > 0");
  }
  if (options_.rule.freshness_ms <= 0) {
    fail(ErrorCode::ValidationError, "proximity freshness must be > 0");
  }
}

std::string EventEngine::create_zone(GeofenceZone zone) {
  geo::validate_polygon(zone.polygon);
  if (zone.alt_min && zone.alt_max && !(*zone.alt_min < *zone.alt_max)) {
    fail(ErrorCode::ValidationError, "altitude band is inverted");
  }
  if (zone.kind == ZoneKind::NoFly && !zone.bound_devices.empty()) {
    fail(ErrorCode::ValidationError,
         "no-fly zones cannot bind devices; use a field boundary");
  }
  std::lock_guard lock(mu_);
  if (zone.zone_id.empty()) {
    zone.zone_id = "zone-" + std::to_string(next_zone_seq_++);
  }
  if (zones_.contains(zone.zone_id)) {
    fail(ErrorCode::ValidationError, "zone id already exists: " + zone.zone_id);
  }
  std::string id = zone.zone_id;
  zones_.emplace(id, std::move(zone));
  return id;
}

std::vector<GeofenceZone> EventEngine::list_zones() const {
  std::lock_guard lock(mu_);
  std::vector<GeofenceZone> out;
  out.reserve(zones_.size());
  for (const auto& [_, z] : zones_) out.push_back(z);
  return out;
}

bool EventEngine::debounced(const DebounceKey& key, TimestampMs at) const {
  const auto it = last_emitted_.find(key);
  return it != last_emitted_.end() &&
         at - it->second < options_.debounce_window_ms;
}

std::vector<Event> EventEngine::evaluate(const std::string& device_id,
                                         const geo::GeoPoint& pos,
                                         TimestampMs at) {
  const tracking::Device device = devices_.get(device_id);  // UnknownDevice

  // Snapshot before taking our own lock; the store has its own.
  const std::set<store::LayerKind> dynamic_only{
      store::LayerKind::HighlyDynamic};
  const store::MapSnapshot snapshot =
      object_store_.query_at(at, std::nullopt, dynamic_only);

  std::vector<Event> emitted;
  std::lock_guard lock(mu_);

  for (const auto& obj : snapshot.objects) {
    if (!options_.rule.classes.contains(obj.object_class)) continue;
    if (obj.source_device == device_id) continue;  // never self-alert
    if (obj.timestamp < at - options_.rule.freshness_ms) continue;
    std::optional<std::string> obj_region;
    if (const auto it = obj.attributes.find("region_tag");
        it != obj.attributes.end()) {
      obj_region = it->second;
    }
    if (!region_visible(obj_region, device.region)) continue;
    const double distance = geo::haversine_distance(pos, obj.position);
    if (distance > options_.rule.radius_m) continue;

    const DebounceKey key{device_id, EventKind::ProximityAlert, obj.object_id};
    if (debounced(key, at)) continue;
    last_emitted_[key] = at;

    Event e;
    e.event_id = next_event_id_++;
    e.kind = EventKind::ProximityAlert;
    e.target_device = device_id;
    e.subject = obj.object_id;
    e.at = at;
    e.distance_m = distance;
    e.position = obj.position;
    emitted.push_back(std::move(e));
  }

  for (const auto& [zone_id, zone] : zones_) {
    if (!region_visible(zone.region_tag, device.region)) continue;

    if (zone.kind == ZoneKind::NoFly) {
      if (geo::point_in_polygon(pos, zone.polygon) && altitude_ok(pos, zone)) {
        const DebounceKey key{device_id, EventKind::GeofenceViolation, zone_id};
        if (debounced(key, at)) continue;
        last_emitted_[key] = at;
        Event e;
        e.event_id = next_event_id_++;
        e.kind = EventKind::GeofenceViolation;
        e.target_device = device_id;
        e.subject = zone_id;
        e.at = at;
        e.position = pos;
        emitted.push_back(std::move(e));
      }
    } else if (zone.bound_devices.contains(device_id)) {
      const bool in_field =
          geo::point_in_polygon(pos, zone.polygon) && altitude_ok(pos, zone);
      if (!in_field) {
        const DebounceKey key{device_id, EventKind::GeofenceExitViolation,
                              zone_id};
        if (debounced(key, at)) continue;
        last_emitted_[key] = at;
        Event e;
        e.event_id = next_event_id_++;
        e.kind = EventKind::GeofenceExitViolation;
        e.target_device = device_id;
        e.subject = zone_id;
        e.at = at;
        e.position = pos;
        emitted.push_back(std::move(e));
      }
    }
  }

  if (!emitted.empty()) {
    auto& queue = queues_[device_id];
    queue.insert(queue.end(), emitted.begin(), emitted.end());
    cv_.notify_all();
  }
  return emitted;
}

std::vector<Event> EventEngine::collect_locked(const std::string& device_id,
                                               std::uint64_t after) const {
  std::vector<Event> out;
  const auto it = queues_.find(device_id);
  if (it == queues_.end()) return out;
  for (const auto& e : it->second) {
    if (e.event_id > after) out.push_back(e);
  }
  return out;
}

std::vector<Event> EventEngine::poll_events(const std::string& device_id,
                                            std::uint64_t after) const {
  if (!devices_.exists(device_id)) {
    fail(ErrorCode::UnknownDevice, "unknown device: " + device_id);
  }
  std::lock_guard lock(mu_);
  return collect_locked(device_id, after);
}

std::vector<Event> EventEngine::poll_events_wait(const std::string& device_id,
                                                 std::uint64_t after,
                                                 int wait_ms) {
  if (!devices_.exists(device_id)) {
    fail(ErrorCode::UnknownDevice, "unknown device: " + device_id);
  }
  std::unique_lock lock(mu_);
  auto events = collect_locked(device_id, after);
  if (!events.empty() || wait_ms <= 0) return events;
  cv_.wait_for(lock, std::chrono::milliseconds(wait_ms), [&] {
    events = collect_locked(device_id, after);
    return !events.empty();
  });
  return events;
}

}  // namespace ldm::events
