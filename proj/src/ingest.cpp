// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/ingest.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "ldm/error.hpp"
#include "ldm/json_codec.hpp"

namespace ldm::ingest {

MockDetector::MockDetector(MockDetectorConfig config)
    : config_(std::move(config)), rng_(config_.seed) {}

Detector::Result MockDetector::detect(const FrameRecord& frame) {
  std::lock_guard lock(mu_);
  if (config_.failing_frames.contains(frame.frame_id)) {
    fail(ErrorCode::DetectorFailure,
         "detector failed on frame: " + frame.frame_id);
  }
  Result result;
  if (const auto it = config_.script.find(frame.frame_id);
      it != config_.script.end()) {
    result.detections = it->second;
  }
  result.detection_ms = config_.detection_ms;
  result.filtering_ms = config_.filtering_ms;
  if (config_.jitter_ms > 0.0) {
    std::uniform_real_distribution<double> jitter(-config_.jitter_ms,
                                                  config_.jitter_ms);
    result.detection_ms = std::max(0.0, result.detection_ms + jitter(rng_));
    result.filtering_ms = std::max(0.0, result.filtering_ms + jitter(rng_));
  }
  return result;
}

IngestPipeline::IngestPipeline(const auth::AuthRegistry& auth,
                               const tracking::DeviceRegistry& devices,
                               store::ObjectStore& object_store,
                               std::shared_ptr<Detector> detector,
                               PipelineOptions options)
    : auth_(auth),
      devices_(devices),
      object_store_(object_store),
      detector_(std::move(detector)),
      options_(std::move(options)) {
  if (options_.confidence_threshold < 0.0 ||
      options_.confidence_threshold > 1.0) {
    fail(ErrorCode::ValidationError, "confidence threshold out of [0,1]");
  }
  runs_[options_.run_id];  // the pipeline's own run always exists
  if (options_.latency_log_path) {
    latency_file_.open(*options_.latency_log_path, std::ios::app);
    if (!latency_file_) {
      fail(ErrorCode::ValidationError,
           "cannot open latency log: " + options_.latency_log_path->string());
    }
  }
}

AnnotatedFrame IngestPipeline::ingest_frame(const std::string& token,
                                            const FrameRecord& frame) {
  const std::string authed_device = auth_.verify(token);
  if (authed_device != frame.device_id) {
    fail(ErrorCode::InvalidToken,
         "token is not bound to device " + frame.device_id);
  }
  const tracking::Device device = devices_.get(frame.device_id);
  if (frame.frame_id.empty()) {
    fail(ErrorCode::ValidationError, "frame_id must not be empty");
  }
  if (frame.quality.empty()) {
    fail(ErrorCode::ValidationError, "quality label must not be empty");
  }
  if (frame.capture_ts < 0) {
    fail(ErrorCode::ValidationError, "capture_ts must be >= 0");
  }

  std::vector<Detection> detections;
  StageLatency latency{frame.frame_id, 0.0, 0.0};
  if (frame.detections) {
    // Pre-detected frame: the two detector stages never run.
    detections = *frame.detections;
  } else {
    const Detector::Result result = detector_->detect(frame);
    detections = result.detections;
    latency.detection_ms = result.detection_ms;
    latency.filtering_ms = result.filtering_ms;
  }
  for (const auto& d : detections) {
    geo::validate(d.bbox);
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      fail(ErrorCode::ValidationError, "detection confidence out of [0,1]");
    }
    if (d.world_position) geo::validate(*d.world_position);
  }

  AnnotatedFrame annotated;
  annotated.frame_id = frame.frame_id;
  annotated.device_id = frame.device_id;
  annotated.capture_ts = frame.capture_ts;
  annotated.latency = latency;

  std::vector<std::pair<std::size_t, Detection>> accepted;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].confidence >= options_.confidence_threshold) {
      accepted.emplace_back(i, detections[i]);
    }
  }

  // Resolve positions before committing anything, so a NoPosition failure
  // stores no partial frame.
  std::vector<store::MapObject> objects;
  objects.reserve(accepted.size());
  for (const auto& [index, detection] : accepted) {
    store::MapObject obj;
    obj.object_id = frame.frame_id + ":" + std::to_string(index);
    obj.object_class = detection.object_class;
    if (detection.world_position) {
      obj.position = *detection.world_position;
    } else if (device.last_position) {
      obj.position = *device.last_position;
    } else {
      fail(ErrorCode::NoPosition,
           "detection has no world position and device " + frame.device_id +
               " has never reported a location");
    }
    obj.timestamp = frame.capture_ts;
    obj.layer = store::LayerKind::HighlyDynamic;
    obj.source_device = frame.device_id;
    obj.confidence = detection.confidence;
    obj.attributes["frame_id"] = frame.frame_id;
    obj.attributes["detection_index"] = std::to_string(index);
    if (device.region) obj.attributes["region_tag"] = *device.region;
    objects.push_back(std::move(obj));
    annotated.accepted_detections.push_back(detection);
  }

  std::lock_guard lock(mu_);
  for (const auto& obj : objects) object_store_.insert_object(obj);
  runs_[options_.run_id].push_back(latency);
  if (latency_file_.is_open()) {
    latency_file_ << codec::to_json(latency).dump() << '\n';
    latency_file_.flush();
  }
  auto& feed = published_[frame.device_id];
  feed.push_back(annotated);
  while (feed.size() > options_.published_frames_cap) feed.pop_front();
  return annotated;
}

std::vector<StageLatency> IngestPipeline::latency_log(
    const std::string& run_id) const {
  std::lock_guard lock(mu_);
  const auto it = runs_.find(run_id);
  if (it == runs_.end()) {
    fail(ErrorCode::UnknownRun, "unknown run: " + run_id);
  }
  return it->second;
}

std::vector<AnnotatedFrame> IngestPipeline::recent_frames(
    const std::string& device_id) const {
  std::lock_guard lock(mu_);
  const auto it = published_.find(device_id);
  if (it == published_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

LatencySummary summarize_latency(const std::vector<StageLatency>& log) {
  if (log.empty()) {
    fail(ErrorCode::ValidationError, "latency log is empty");
  }
  LatencySummary summary;
  summary.frames = log.size();
  for (const auto& entry : log) {
    summary.mean_detection_ms += entry.detection_ms;
    summary.mean_filtering_ms += entry.filtering_ms;
  }
  summary.mean_detection_ms /= static_cast<double>(log.size());
  summary.mean_filtering_ms /= static_cast<double>(log.size());
  summary.mean_total_ms = summary.mean_detection_ms + summary.mean_filtering_ms;
  return summary;
}

}  // namespace ldm::ingest
