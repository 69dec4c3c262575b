// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldm/auth.hpp"
#include "ldm/config.hpp"
#include "ldm/events.hpp"
#include "ldm/ingest.hpp"
#include "ldm/store.hpp"
#include "ldm/tracking.hpp"

namespace ldm::service {

// One-process composition of the LDM modules. Cross-module flows live here:
// subscribing registers the device for tracking, and an accepted location
// update is mirrored into the store as an ego object and then evaluated for
// events, in that order.
class LdmService {
 public:
  explicit LdmService(ServiceConfig config = {}, Clock clock = system_clock_ms);

  auth::SubscribeResult subscribe(DeviceKind kind,
                                  std::optional<std::string> requested_id = {},
                                  std::optional<std::string> region = {});
  std::string verify(const std::string& token) const;
  void revoke(const std::string& token);

  // Returns the events this fix emitted (they are also queued for polling).
  std::vector<events::Event> update_location(const std::string& device_id,
                                             const geo::GeoPoint& pos,
                                             TimestampMs at);

  std::vector<tracking::DeviceView> list_devices() const;
  std::vector<tracking::DeviceView> list_devices(TimestampMs now) const;

  ingest::AnnotatedFrame ingest_frame(const std::string& token,
                                      const ingest::FrameRecord& frame);

  store::MapSnapshot query_at(
      TimestampMs at, const std::optional<store::BoundingBox>& region = {},
      const std::optional<std::set<store::LayerKind>>& layers = {}) const;
  std::vector<store::MapObject> object_history(const std::string& object_id,
                                               TimestampMs from,
                                               TimestampMs to) const;

  std::string create_zone(events::GeofenceZone zone);
  std::vector<events::GeofenceZone> list_zones() const;

  std::vector<events::Event> poll_events(const std::string& device_id,
                                         std::uint64_t after) const;
  std::vector<events::Event> poll_events_wait(const std::string& device_id,
                                              std::uint64_t after, int wait_ms);

  void flush();

  const ServiceConfig& config() const { return config_; }
  store::ObjectStore& object_store() { return store_; }
  const tracking::DeviceRegistry& devices() const { return devices_; }
  ingest::IngestPipeline& pipeline() { return pipeline_; }
  events::EventEngine& engine() { return events_; }
  TimestampMs now() const { return clock_(); }

 private:
  ServiceConfig config_;
  Clock clock_;
  auth::AuthRegistry auth_;
  store::ObjectStore store_;
  tracking::DeviceRegistry devices_;
  events::EventEngine events_;
  std::shared_ptr<ingest::MockDetector> detector_;
  ingest::IngestPipeline pipeline_;
};

}  // namespace ldm::service
