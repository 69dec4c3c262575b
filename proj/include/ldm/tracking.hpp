// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ldm/geo.hpp"
#include "ldm/types.hpp"

namespace ldm::tracking {

struct Device {
  std::string device_id;
  DeviceKind kind = DeviceKind::Vehicle;
  // Optional membership in one edge vicinity; zones and objects tagged with
  // a different region are invisible to this device.
  std::optional<std::string> region;
  std::optional<geo::GeoPoint> last_position;
  std::optional<TimestampMs> last_update;
};

enum class DeviceStatus { Live, Offline };

struct DeviceView {
  Device device;
  DeviceStatus status = DeviceStatus::Offline;
};

// Live location registry. Status is always derived, never stored: a device
// is Live iff now - last_update <= offline_timeout.
class DeviceRegistry {
 public:
  explicit DeviceRegistry(TimestampMs offline_timeout_ms = 10'000);

  void register_device(const std::string& device_id, DeviceKind kind,
                       std::optional<std::string> region = {});

  // Rejects out-of-order fixes: at must be strictly greater than the
  // device's last_update. Throws UnknownDevice / StaleUpdate.
  void update_location(const std::string& device_id, const geo::GeoPoint& pos,
                       TimestampMs at);

  Device get(const std::string& device_id) const;  // UnknownDevice
  bool exists(const std::string& device_id) const;

  std::vector<DeviceView> list_devices(TimestampMs now) const;

  TimestampMs offline_timeout_ms() const { return offline_timeout_ms_; }

 private:
  TimestampMs offline_timeout_ms_;
  mutable std::mutex mu_;
  std::map<std::string, Device> devices_;
};

std::string_view kind_name(DeviceKind kind);
DeviceKind kind_from_name(std::string_view name);
std::string_view status_name(DeviceStatus status);

}  // namespace ldm::tracking
