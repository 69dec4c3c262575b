// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldm/events.hpp"
#include "ldm/ingest.hpp"
#include "ldm/json_codec.hpp"
#include "ldm/types.hpp"

namespace ldm::sim {

struct Waypoint {
  geo::GeoPoint position;
  TimestampMs at = 0;
};

/// A scripted device. Positions are interpolated linearly between waypoints
/// (clamped outside the span); frames lists what this agent "sees" at a
/// given tick.
struct Agent {
  std::string device_id;
  DeviceKind kind = DeviceKind::Vehicle;
  std::optional<std::string> region;
  std::string quality = "720p";
  std::vector<Waypoint> waypoints;
  std::map<int, std::vector<ingest::Detection>> frames;
};

struct ExpectedEvent {
  int tick = 0;
  events::EventKind kind = events::EventKind::ProximityAlert;
  std::string target_device;
  std::optional<std::string> subject;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  TimestampMs tick_ms = 100;
  TimestampMs duration_ms = 0;
  std::vector<events::GeofenceZone> zones;
  std::vector<Agent> agents;
  // Exhaustive list for `sim run --assert`; empty means "expect no events".
  std::vector<ExpectedEvent> expected_events;
};

Scenario scenario_from_json(const codec::json& j);
Scenario load_scenario_file(const std::filesystem::path& path);

geo::GeoPoint interpolate_position(const std::vector<Waypoint>& waypoints,
                                   TimestampMs t);

struct ObservedEvent {
  int tick = 0;
  std::string agent;
  events::Event event;
};

struct ScenarioTranscript {
  std::vector<std::string> lines;  // one JSON document per request/response
  std::vector<ObservedEvent> events;

  std::string text() const;
};

// Subscribes every agent, replays location updates and frames tick by tick
// in agent-list order, and polls events each tick. Scenario time is carried
// in the requests' `at` fields, so the transcript is deterministic and
// independent of wall-clock speed (token values are redacted for the same
// reason). Throws EndpointUnreachable / ScenarioAbort.
ScenarioTranscript run_scenario(const Scenario& scenario,
                                const std::string& endpoint);

// Empty string when the observed events match scenario.expected_events
// exactly (in order); otherwise a human-readable mismatch description.
std::string check_expectations(const Scenario& scenario,
                               const ScenarioTranscript& transcript);

}  // namespace ldm::sim
