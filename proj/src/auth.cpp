// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/auth.hpp"

#include <array>
#include <cstdio>
#include <random>

#include "ldm/error.hpp"

namespace ldm::auth {

namespace {

constexpr char kUrlSafeAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::vector<unsigned char> random_bytes(std::size_t n) {
  std::vector<unsigned char> out(n);
  if (std::FILE* f = std::fopen("/dev/urandom", "rb")) {
    const std::size_t got = std::fread(out.data(), 1, n, f);
    std::fclose(f);
    if (got == n) return out;
  }
  // Fallback; on Linux random_device is itself CSPRNG-backed.
  std::random_device rd;
  for (auto& b : out) b = static_cast<unsigned char>(rd() & 0xff);
  return out;
}

// base64url without padding: 32 bytes -> 43 chars.
std::string base64url(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() * 4 + 2) / 3);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kUrlSafeAlphabet[(v >> 18) & 63]);
    out.push_back(kUrlSafeAlphabet[(v >> 12) & 63]);
    out.push_back(kUrlSafeAlphabet[(v >> 6) & 63]);
    out.push_back(kUrlSafeAlphabet[v & 63]);
    i += 3;
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const unsigned v = bytes[i] << 16;
    out.push_back(kUrlSafeAlphabet[(v >> 18) & 63]);
    out.push_back(kUrlSafeAlphabet[(v >> 12) & 63]);
  } else if (rest == 2) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kUrlSafeAlphabet[(v >> 18) & 63]);
    out.push_back(kUrlSafeAlphabet[(v >> 12) & 63]);
    out.push_back(kUrlSafeAlphabet[(v >> 6) & 63]);
  }
  return out;
}

std::string hex(const std::vector<unsigned char>& bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

}  // namespace

std::string random_token() { return base64url(random_bytes(32)); }

std::string random_device_id(DeviceKind kind) {
  const char* prefix = kind == DeviceKind::Uav ? "uav-" : "vehicle-";
  return prefix + hex(random_bytes(8));
}

AuthRegistry::AuthRegistry(Clock clock) : clock_(std::move(clock)) {}

SubscribeResult AuthRegistry::subscribe(
    DeviceKind kind, std::optional<std::string> requested_id) {
  std::lock_guard lock(mu_);
  std::string device_id;
  if (requested_id) {
    if (requested_id->empty()) {
      fail(ErrorCode::ValidationError, "device_id must not be empty");
    }
    if (subscriptions_.contains(*requested_id)) {
      fail(ErrorCode::DuplicateDevice,
           "device already registered: " + *requested_id);
    }
    device_id = *requested_id;
  } else {
    do {
      device_id = random_device_id(kind);
    } while (subscriptions_.contains(device_id));
  }

  std::string token = random_token();
  while (live_tokens_.contains(token)) token = random_token();

  const TimestampMs now = clock_();
  subscriptions_[device_id] = Subscription{device_id, kind, now};
  live_tokens_[token] = TokenRecord{device_id, now};
  return SubscribeResult{device_id, token};
}

std::string AuthRegistry::verify(const std::string& token_value) const {
  std::lock_guard lock(mu_);
  const auto it = live_tokens_.find(token_value);
  if (it == live_tokens_.end()) {
    fail(ErrorCode::InvalidToken, "token is not live");
  }
  return it->second.device_id;
}

void AuthRegistry::revoke(const std::string& token_value) {
  std::lock_guard lock(mu_);
  const auto it = live_tokens_.find(token_value);
  if (it == live_tokens_.end()) {
    fail(ErrorCode::InvalidToken, "token is not live");
  }
  live_tokens_.erase(it);
}

std::vector<Subscription> AuthRegistry::subscriptions() const {
  std::lock_guard lock(mu_);
  std::vector<Subscription> out;
  out.reserve(subscriptions_.size());
  for (const auto& [_, sub] : subscriptions_) out.push_back(sub);
  return out;
}

}  // namespace ldm::auth
