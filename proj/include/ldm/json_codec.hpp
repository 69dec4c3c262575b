// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <initializer_list>
#include <string_view>

#include <json.hpp>

#include "ldm/events.hpp"
#include "ldm/ingest.hpp"
#include "ldm/metrics.hpp"
#include "ldm/store.hpp"
#include "ldm/tracking.hpp"

// Wire encoding for every externally visible schema: API bodies, the store
// journal, zone import files, frame/annotation/latency logs. Parsers are
// strict: unknown fields are rejected so client drift surfaces early.
namespace ldm::codec {

using nlohmann::json;

// Throws ValidationError unless j is an object with exactly the required
// fields plus any subset of the optional ones.
void check_fields(const json& j, std::string_view what,
                  std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional = {});

json parse(const std::string& text);  // BadRequest on malformed JSON

json to_json(const geo::GeoPoint& p);
geo::GeoPoint geopoint_from_json(const json& j);

json to_json(const geo::PixelBox& b);
geo::PixelBox pixelbox_from_json(const json& j);

json to_json(const store::MapObject& obj);
store::MapObject map_object_from_json(const json& j);

json to_json(const store::MapSnapshot& snapshot);

json to_json(const tracking::DeviceView& view);

json to_json(const events::GeofenceZone& zone);
events::GeofenceZone zone_from_json(const json& j);

json to_json(const events::Event& event);
events::Event event_from_json(const json& j);

json to_json(const ingest::Detection& d);
ingest::Detection detection_from_json(const json& j);

json to_json(const ingest::FrameRecord& frame);
ingest::FrameRecord frame_record_from_json(const json& j);

json to_json(const ingest::StageLatency& latency);
ingest::StageLatency stage_latency_from_json(const json& j);

json to_json(const ingest::AnnotatedFrame& frame);

json to_json(const metrics::FrameAnnotation& annotation);
metrics::FrameAnnotation frame_annotation_from_json(const json& j);

json to_json(const metrics::MetricsReport& report);

}  // namespace ldm::codec
