// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/service.hpp"

#include "ldm/error.hpp"

namespace ldm::service {

LdmService::LdmService(ServiceConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      auth_(clock_),
      store_(config_.store, clock_),
      devices_(config_.offline_timeout_ms),
      events_(store_, devices_, config_.events),
      detector_(std::make_shared<ingest::MockDetector>(config_.detector)),
      pipeline_(auth_, devices_, store_, detector_, config_.ingest) {}

auth::SubscribeResult LdmService::subscribe(
    DeviceKind kind, std::optional<std::string> requested_id,
    std::optional<std::string> region) {
  auth::SubscribeResult result = auth_.subscribe(kind, std::move(requested_id));
  devices_.register_device(result.device_id, kind, std::move(region));
  return result;
}

std::string LdmService::verify(const std::string& token) const {
  return auth_.verify(token);
}

void LdmService::revoke(const std::string& token) { auth_.revoke(token); }

std::vector<events::Event> LdmService::update_location(
    const std::string& device_id, const geo::GeoPoint& pos, TimestampMs at) {
  // Same skew gate the store applies, checked up front so a rejected fix
  // leaves the registry untouched too.
  if (at > clock_() + config_.store.clock_skew_budget_ms) {
    fail(ErrorCode::FutureTimestamp,
         "fix timestamp is beyond the clock skew budget");
  }
  devices_.update_location(device_id, pos, at);

  // Mirror the accepted fix into the map so past device positions are
  // visible in snapshots.
  const tracking::Device device = devices_.get(device_id);
  store::MapObject ego;
  ego.object_id = device_id;
  ego.object_class =
      device.kind == DeviceKind::Uav ? "ego-uav" : "ego-vehicle";
  ego.position = pos;
  ego.timestamp = at;
  ego.layer = store::LayerKind::HighlyDynamic;
  ego.source_device = device_id;
  ego.confidence = 1.0;
  if (device.region) ego.attributes["region_tag"] = *device.region;
  store_.insert_object(ego);

  // Event evaluation runs strictly after the registry write commits.
  return events_.evaluate(device_id, pos, at);
}

std::vector<tracking::DeviceView> LdmService::list_devices() const {
  return devices_.list_devices(clock_());
}

std::vector<tracking::DeviceView> LdmService::list_devices(
    TimestampMs now) const {
  return devices_.list_devices(now);
}

ingest::AnnotatedFrame LdmService::ingest_frame(
    const std::string& token, const ingest::FrameRecord& frame) {
  return pipeline_.ingest_frame(token, frame);
}

store::MapSnapshot LdmService::query_at(
    TimestampMs at, const std::optional<store::BoundingBox>& region,
    const std::optional<std::set<store::LayerKind>>& layers) const {
  return store_.query_at(at, region, layers);
}

std::vector<store::MapObject> LdmService::object_history(
    const std::string& object_id, TimestampMs from, TimestampMs to) const {
  return store_.object_history(object_id, from, to);
}

std::string LdmService::create_zone(events::GeofenceZone zone) {
  return events_.create_zone(std::move(zone));
}

std::vector<events::GeofenceZone> LdmService::list_zones() const {
  return events_.list_zones();
}

std::vector<events::Event> LdmService::poll_events(
    const std::string& device_id, std::uint64_t after) const {
  return events_.poll_events(device_id, after);
}

std::vector<events::Event> LdmService::poll_events_wait(
    const std::string& device_id, std::uint64_t after, int wait_ms) {
  return events_.poll_events_wait(device_id, after, wait_ms);
}

void LdmService::flush() { store_.flush(); }

}  // namespace ldm::service
