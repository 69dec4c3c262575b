// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ldm/types.hpp"

namespace ldm::auth {

struct Subscription {
  std::string device_id;
  DeviceKind kind = DeviceKind::Vehicle;
  TimestampMs created_at = 0;
};

struct TokenRecord {
  std::string device_id;
  TimestampMs issued_at = 0;
};

struct SubscribeResult {
  std::string device_id;
  std::string token;
};

/// 43-character URL-safe encoding of 32 bytes from the system CSPRNG.
std::string random_token();

/// "vehicle-<hex>" / "uav-<hex>" with 64 bits of randomness.
std::string random_device_id(DeviceKind kind);

// Subscription registry plus bearer-token table. One live token per device;
// tokens do not expire until revoked.
class AuthRegistry {
 public:
  explicit AuthRegistry(Clock clock = system_clock_ms);

  // Throws DuplicateDevice when requested_id is already registered.
  SubscribeResult subscribe(DeviceKind kind,
                            std::optional<std::string> requested_id = {});

  // Returns the bound device_id; throws InvalidToken for unknown or
  // revoked values.
  std::string verify(const std::string& token_value) const;

  // Throws InvalidToken when the token is not live (revoke is not
  // idempotent by contract).
  void revoke(const std::string& token_value);

  std::vector<Subscription> subscriptions() const;

 private:
  mutable std::mutex mu_;
  Clock clock_;
  std::map<std::string, Subscription> subscriptions_;  // by device_id
  std::map<std::string, TokenRecord> live_tokens_;     // by token value
};

}  // namespace ldm::auth
