// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/json_codec.hpp"

#include <set>
#include <string>

#include "ldm/error.hpp"

namespace ldm::codec {

namespace {

std::string str(std::string_view v) { return std::string(v); }

double number_field(const json& j, std::string_view key,
                    std::string_view what) {
  const auto& v = j.at(str(key));
  if (!v.is_number()) {
    fail(ErrorCode::ValidationError,
         str(what) + ": field '" + str(key) + "' must be a number");
  }
  return v.get<double>();
}

std::int64_t int_field(const json& j, std::string_view key,
                       std::string_view what) {
  const auto& v = j.at(str(key));
  if (!v.is_number_integer()) {
    fail(ErrorCode::ValidationError,
         str(what) + ": field '" + str(key) + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string string_field(const json& j, std::string_view key,
                         std::string_view what) {
  const auto& v = j.at(str(key));
  if (!v.is_string()) {
    fail(ErrorCode::ValidationError,
         str(what) + ": field '" + str(key) + "' must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

void check_fields(const json& j, std::string_view what,
                  std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional) {
  if (!j.is_object()) {
    fail(ErrorCode::ValidationError, str(what) + ": expected a JSON object");
  }
  for (const auto key : required) {
    if (!j.contains(str(key))) {
      fail(ErrorCode::ValidationError,
           str(what) + ": missing field '" + str(key) + "'");
    }
  }
  std::set<std::string_view> allowed(required);
  allowed.insert(optional.begin(), optional.end());
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      fail(ErrorCode::ValidationError,
           str(what) + ": unknown field '" + key + "'");
    }
  }
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    fail(ErrorCode::BadRequest, "malformed JSON");
  }
  return j;
}

json to_json(const geo::GeoPoint& p) {
  json j{{"lat", p.lat}, {"lon", p.lon}};
  if (p.alt) j["alt"] = *p.alt;
  return j;
}

geo::GeoPoint geopoint_from_json(const json& j) {
  check_fields(j, "position", {"lat", "lon"}, {"alt"});
  geo::GeoPoint p;
  p.lat = number_field(j, "lat", "position");
  p.lon = number_field(j, "lon", "position");
  if (j.contains("alt") && !j["alt"].is_null()) {
    p.alt = number_field(j, "alt", "position");
  }
  geo::validate(p);
  return p;
}

json to_json(const geo::PixelBox& b) {
  return json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

geo::PixelBox pixelbox_from_json(const json& j) {
  check_fields(j, "bbox", {"x", "y", "w", "h"});
  geo::PixelBox b;
  b.x = number_field(j, "x", "bbox");
  b.y = number_field(j, "y", "bbox");
  b.w = number_field(j, "w", "bbox");
  b.h = number_field(j, "h", "bbox");
  geo::validate(b);
  return b;
}

json to_json(const store::MapObject& obj) {
  return json{{"object_id", obj.object_id},
              {"class", obj.object_class},
              {"position", to_json(obj.position)},
              {"timestamp", obj.timestamp},
              {"layer", str(store::layer_name(obj.layer))},
              {"source_device", obj.source_device},
              {"confidence", obj.confidence},
              {"attributes", obj.attributes}};
}

store::MapObject map_object_from_json(const json& j) {
  check_fields(j, "object",
               {"object_id", "class", "position", "timestamp", "layer",
                "source_device", "confidence"},
               {"attributes"});
  store::MapObject obj;
  obj.object_id = string_field(j, "object_id", "object");
  obj.object_class = string_field(j, "class", "object");
  obj.position = geopoint_from_json(j.at("position"));
  obj.timestamp = int_field(j, "timestamp", "object");
  obj.layer = store::layer_from_name(string_field(j, "layer", "object"));
  obj.source_device = string_field(j, "source_device", "object");
  obj.confidence = number_field(j, "confidence", "object");
  if (j.contains("attributes")) {
    const auto& attrs = j.at("attributes");
    if (!attrs.is_object()) {
      fail(ErrorCode::ValidationError, "object: attributes must be an object");
    }
    for (const auto& [key, value] : attrs.items()) {
      if (!value.is_string()) {
        fail(ErrorCode::ValidationError,
             "object: attribute '" + key + "' must be a string");
      }
      obj.attributes[key] = value.get<std::string>();
    }
  }
  return obj;
}

json to_json(const store::MapSnapshot& snapshot) {
  json objects = json::array();
  for (const auto& obj : snapshot.objects) objects.push_back(to_json(obj));
  return json{{"at", snapshot.at}, {"objects", std::move(objects)}};
}

json to_json(const tracking::DeviceView& view) {
  json j{{"device_id", view.device.device_id},
         {"kind", str(tracking::kind_name(view.device.kind))},
         {"status", str(tracking::status_name(view.status))}};
  if (view.device.region) j["region"] = *view.device.region;
  if (view.device.last_position) {
    j["last_position"] = to_json(*view.device.last_position);
  }
  if (view.device.last_update) j["last_update"] = *view.device.last_update;
  return j;
}

json to_json(const events::GeofenceZone& zone) {
  json vertices = json::array();
  for (const auto& v : zone.polygon.vertices) {
    vertices.push_back(json{{"lat", v.lat}, {"lon", v.lon}});
  }
  json j{{"zone_id", zone.zone_id},
         {"kind", str(events::zone_kind_name(zone.kind))},
         {"vertices", std::move(vertices)}};
  if (zone.alt_min) j["alt_min"] = *zone.alt_min;
  if (zone.alt_max) j["alt_max"] = *zone.alt_max;
  if (!zone.bound_devices.empty()) j["bound_devices"] = zone.bound_devices;
  if (zone.region_tag) j["region_tag"] = *zone.region_tag;
  return j;
}

events::GeofenceZone zone_from_json(const json& j) {
  check_fields(j, "zone", {"kind", "vertices"},
               {"zone_id", "alt_min", "alt_max", "bound_devices", "region_tag"});
  events::GeofenceZone zone;
  if (j.contains("zone_id")) zone.zone_id = string_field(j, "zone_id", "zone");
  zone.kind = events::zone_kind_from_name(string_field(j, "kind", "zone"));
  const auto& vertices = j.at("vertices");
  if (!vertices.is_array()) {
    fail(ErrorCode::ValidationError, "zone: vertices must be an array");
  }
  for (const auto& v : vertices) {
    check_fields(v, "zone vertex", {"lat", "lon"});
    geo::GeoPoint p;
    p.lat = number_field(v, "lat", "zone vertex");
    p.lon = number_field(v, "lon", "zone vertex");
    zone.polygon.vertices.push_back(p);
  }
  if (j.contains("alt_min") && !j["alt_min"].is_null()) {
    zone.alt_min = number_field(j, "alt_min", "zone");
  }
  if (j.contains("alt_max") && !j["alt_max"].is_null()) {
    zone.alt_max = number_field(j, "alt_max", "zone");
  }
  if (j.contains("bound_devices")) {
    const auto& devices = j.at("bound_devices");
    if (!devices.is_array()) {
      fail(ErrorCode::ValidationError, "zone: bound_devices must be an array");
    }
    for (const auto& d : devices) {
      if (!d.is_string()) {
        fail(ErrorCode::ValidationError,
             "zone: bound_devices entries must be strings");
      }
      zone.bound_devices.insert(d.get<std::string>());
    }
  }
  if (j.contains("region_tag")) {
    zone.region_tag = string_field(j, "region_tag", "zone");
  }
  return zone;
}

json to_json(const events::Event& event) {
  json j{{"event_id", event.event_id},
         {"kind", str(events::event_kind_name(event.kind))},
         {"target_device", event.target_device},
         {"subject", event.subject},
         {"at", event.at},
         {"position", to_json(event.position)}};
  if (event.distance_m) j["distance"] = *event.distance_m;
  return j;
}

events::Event event_from_json(const json& j) {
  check_fields(j, "event",
               {"event_id", "kind", "target_device", "subject", "at",
                "position"},
               {"distance"});
  events::Event e;
  e.event_id = static_cast<std::uint64_t>(int_field(j, "event_id", "event"));
  e.kind = events::event_kind_from_name(string_field(j, "kind", "event"));
  e.target_device = string_field(j, "target_device", "event");
  e.subject = string_field(j, "subject", "event");
  e.at = int_field(j, "at", "event");
  e.position = geopoint_from_json(j.at("position"));
  if (j.contains("distance")) e.distance_m = number_field(j, "distance", "event");
  return e;
}

json to_json(const ingest::Detection& d) {
  json j{{"class", d.object_class},
         {"bbox", to_json(d.bbox)},
         {"confidence", d.confidence}};
  if (d.world_position) j["world_position"] = to_json(*d.world_position);
  return j;
}

ingest::Detection detection_from_json(const json& j) {
  check_fields(j, "detection", {"class", "bbox", "confidence"},
               {"world_position"});
  ingest::Detection d;
  d.object_class = string_field(j, "class", "detection");
  d.bbox = pixelbox_from_json(j.at("bbox"));
  d.confidence = number_field(j, "confidence", "detection");
  if (j.contains("world_position") && !j["world_position"].is_null()) {
    d.world_position = geopoint_from_json(j.at("world_position"));
  }
  return d;
}

json to_json(const ingest::FrameRecord& frame) {
  json j{{"frame_id", frame.frame_id},
         {"device_id", frame.device_id},
         {"capture_ts", frame.capture_ts},
         {"quality", frame.quality},
         {"payload_ref", frame.payload_ref}};
  if (frame.detections) {
    json detections = json::array();
    for (const auto& d : *frame.detections) detections.push_back(to_json(d));
    j["detections"] = std::move(detections);
  }
  return j;
}

ingest::FrameRecord frame_record_from_json(const json& j) {
  check_fields(j, "frame",
               {"frame_id", "device_id", "capture_ts", "quality",
                "payload_ref"},
               {"detections"});
  ingest::FrameRecord frame;
  frame.frame_id = string_field(j, "frame_id", "frame");
  frame.device_id = string_field(j, "device_id", "frame");
  frame.capture_ts = int_field(j, "capture_ts", "frame");
  frame.quality = string_field(j, "quality", "frame");
  frame.payload_ref = string_field(j, "payload_ref", "frame");
  if (j.contains("detections") && !j["detections"].is_null()) {
    const auto& detections = j.at("detections");
    if (!detections.is_array()) {
      fail(ErrorCode::ValidationError, "frame: detections must be an array");
    }
    frame.detections.emplace();
    for (const auto& d : detections) {
      frame.detections->push_back(detection_from_json(d));
    }
  }
  return frame;
}

json to_json(const ingest::StageLatency& latency) {
  return json{{"frame_id", latency.frame_id},
              {"detection_ms", latency.detection_ms},
              {"filtering_ms", latency.filtering_ms}};
}

ingest::StageLatency stage_latency_from_json(const json& j) {
  check_fields(j, "latency", {"frame_id", "detection_ms", "filtering_ms"});
  ingest::StageLatency latency;
  latency.frame_id = string_field(j, "frame_id", "latency");
  latency.detection_ms = number_field(j, "detection_ms", "latency");
  latency.filtering_ms = number_field(j, "filtering_ms", "latency");
  if (latency.detection_ms < 0.0 || latency.filtering_ms < 0.0) {
    fail(ErrorCode::ValidationError, "latency values must be >= 0");
  }
  return latency;
}

json to_json(const ingest::AnnotatedFrame& frame) {
  json accepted = json::array();
  for (const auto& d : frame.accepted_detections) accepted.push_back(to_json(d));
  return json{{"frame_id", frame.frame_id},
              {"device_id", frame.device_id},
              {"capture_ts", frame.capture_ts},
              {"accepted_detections", std::move(accepted)},
              {"latency", to_json(frame.latency)}};
}

json to_json(const metrics::FrameAnnotation& annotation) {
  json boxes = json::array();
  for (const auto& b : annotation.boxes) {
    json box{{"class", b.object_class}, {"bbox", to_json(b.bbox)}};
    if (b.confidence) box["confidence"] = *b.confidence;
    boxes.push_back(std::move(box));
  }
  return json{{"frame_id", annotation.frame_id},
              {"role", str(metrics::role_name(annotation.role))},
              {"quality", annotation.label},
              {"boxes", std::move(boxes)}};
}

metrics::FrameAnnotation frame_annotation_from_json(const json& j) {
  check_fields(j, "annotation", {"frame_id", "role", "quality", "boxes"});
  metrics::FrameAnnotation annotation;
  annotation.frame_id = string_field(j, "frame_id", "annotation");
  annotation.role =
      metrics::role_from_name(string_field(j, "role", "annotation"));
  annotation.label = string_field(j, "quality", "annotation");
  const auto& boxes = j.at("boxes");
  if (!boxes.is_array()) {
    fail(ErrorCode::ValidationError, "annotation: boxes must be an array");
  }
  for (const auto& b : boxes) {
    check_fields(b, "annotation box", {"class", "bbox"}, {"confidence"});
    metrics::AnnotatedBox box;
    box.object_class = string_field(b, "class", "annotation box");
    box.bbox = pixelbox_from_json(b.at("bbox"));
    if (b.contains("confidence")) {
      box.confidence = number_field(b, "confidence", "annotation box");
    }
    // Ground truth carries no confidence; catch mislabeled logs.
    if (annotation.role == metrics::AnnotationRole::GroundTruth &&
        box.confidence) {
      fail(ErrorCode::ValidationError,
           "annotation: ground-truth boxes must not carry confidence");
    }
    annotation.boxes.push_back(std::move(box));
  }
  return annotation;
}

json to_json(const metrics::MetricsReport& report) {
  json j{{"label", report.label},
         {"frames", report.frames},
         {"counts",
          json{{"tp", report.counts.tp},
               {"fp", report.counts.fp},
               {"fn", report.counts.fn}}},
         {"precision",
          report.precision ? json(*report.precision) : json(nullptr)},
         {"recall", report.recall ? json(*report.recall) : json(nullptr)},
         {"mean_detection_ms", report.mean_detection_ms
                                   ? json(*report.mean_detection_ms)
                                   : json(nullptr)},
         {"mean_filtering_ms", report.mean_filtering_ms
                                   ? json(*report.mean_filtering_ms)
                                   : json(nullptr)}};
  return j;
}

}  // namespace ldm::codec
