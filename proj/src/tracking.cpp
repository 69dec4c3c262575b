// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/tracking.hpp"

#include <string>

#include "ldm/error.hpp"

namespace ldm::tracking {

std::string_view kind_name(DeviceKind kind) {
  return kind == DeviceKind::Uav ? "uav" : "vehicle";
}

DeviceKind kind_from_name(std::string_view name) {
  if (name == "vehicle") return DeviceKind::Vehicle;
  if (name == "uav") return DeviceKind::Uav;
  fail(ErrorCode::ValidationError, "unknown device kind: " + std::string(name));
}

std::string_view status_name(DeviceStatus status) {
  return status == DeviceStatus::Live ? "live" : "offline";
}

DeviceRegistry::DeviceRegistry(TimestampMs offline_timeout_ms)
    : offline_timeout_ms_(offline_timeout_ms) {}

void DeviceRegistry::register_device(const std::string& device_id,
                                     DeviceKind kind,
                                     std::optional<std::string> region) {
  std::lock_guard lock(mu_);
  if (devices_.contains(device_id)) {
    fail(ErrorCode::DuplicateDevice, "device already tracked: " + device_id);
  }
  Device d;
  d.device_id = device_id;
  d.kind = kind;
  d.region = std::move(region);
  devices_.emplace(device_id, std::move(d));
}

void DeviceRegistry::update_location(const std::string& device_id,
                                     const geo::GeoPoint& pos,
                                     TimestampMs at) {
  geo::validate(pos);
  if (at < 0) fail(ErrorCode::ValidationError, "timestamp must be >= 0");
  std::lock_guard lock(mu_);
  const auto it = devices_.find(device_id);
  if (it == devices_.end()) {
    fail(ErrorCode::UnknownDevice, "unknown device: " + device_id);
  }
  Device& d = it->second;
  if (d.last_update && at <= *d.last_update) {
    fail(ErrorCode::StaleUpdate,
         "fix at " + std::to_string(at) + " is not newer than " +
             std::to_string(*d.last_update));
  }
  d.last_position = pos;
  d.last_update = at;
}

Device DeviceRegistry::get(const std::string& device_id) const {
  std::lock_guard lock(mu_);
  const auto it = devices_.find(device_id);
  if (it == devices_.end()) {
    fail(ErrorCode::UnknownDevice, "unknown device: " + device_id);
  }
  return it->second;
}

bool DeviceRegistry::exists(const std::string& device_id) const {
  std::lock_guard lock(mu_);
  return devices_.contains(device_id);
}

std::vector<DeviceView> DeviceRegistry::list_devices(TimestampMs now) const {
  std::lock_guard lock(mu_);
  std::vector<DeviceView> out;
  out.reserve(devices_.size());
  for (const auto& [_, d] : devices_) {
    DeviceView view{d, DeviceStatus::Offline};
    if (d.last_update && now - *d.last_update <= offline_timeout_ms_) {
      view.status = DeviceStatus::Live;
    }
    out.push_back(std::move(view));
  }
  return out;
}

}  // namespace ldm::tracking
