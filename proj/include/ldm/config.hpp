// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "ldm/events.hpp"
#include "ldm/ingest.hpp"
#include "ldm/json_codec.hpp"
#include "ldm/store.hpp"
#include "ldm/types.hpp"

namespace ldm::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  store::StoreOptions store;
  TimestampMs offline_timeout_ms = 10'000;
  events::EventEngineOptions events;
  ingest::PipelineOptions ingest;
  ingest::MockDetectorConfig detector;
  double latency_budget_ms = 100.0;
};

// Strict parse; unknown keys are rejected like any other wire input.
// proximity.freshness_ms defaults to ttl.highly_dynamic_ms when unset.
ServiceConfig config_from_json(const codec::json& j);

// Throws ValidationError when the file does not exist or cannot be read.
ServiceConfig load_config_file(const std::filesystem::path& path);

}  // namespace ldm::service
