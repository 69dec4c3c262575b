// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ldm/auth.hpp"
#include "ldm/geo.hpp"
#include "ldm/store.hpp"
#include "ldm/tracking.hpp"
#include "ldm/types.hpp"

namespace ldm::ingest {

struct Detection {
  std::string object_class;
  geo::PixelBox bbox;
  double confidence = 0.0;
  // Reporter-estimated world coordinates; when absent the object is
  // anchored at the reporting device's last known position.
  std::optional<geo::GeoPoint> world_position;
};

/// One camera frame's worth of metadata. payload_ref stands in for the
/// pixel data, which this service never touches. detections is present for
/// pre-detected frames and absent when the pipeline's detector must run.
struct FrameRecord {
  std::string frame_id;
  std::string device_id;
  TimestampMs capture_ts = 0;
  std::string quality;  // "480p", "720p", "1080p", ...
  std::string payload_ref;
  std::optional<std::vector<Detection>> detections;
};

// The two pipeline stage latencies: feature extraction from the frame, and
// classification against the trained model.
struct StageLatency {
  std::string frame_id;
  double detection_ms = 0.0;
  double filtering_ms = 0.0;
};

struct AnnotatedFrame {
  std::string frame_id;
  std::string device_id;
  TimestampMs capture_ts = 0;
  std::vector<Detection> accepted_detections;  // post-threshold
  StageLatency latency;
};

// Seam for the detection model, which is out of scope here. Implementations
// report their own stage latencies. Throws DetectorFailure; the caller skips
// the frame and the pipeline stays usable.
class Detector {
 public:
  struct Result {
    std::vector<Detection> detections;
    double detection_ms = 0.0;
    double filtering_ms = 0.0;
  };

  virtual ~Detector() = default;
  virtual Result detect(const FrameRecord& frame) = 0;
};

struct MockDetectorConfig {
  double detection_ms = 40.0;
  double filtering_ms = 2.0;
  // Uniform +/- jitter around the configured latencies; 0 means constant.
  double jitter_ms = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::vector<Detection>> script;  // by frame_id
  std::set<std::string> failing_frames;
};

// Deterministic detector: scripted detections keyed by frame_id, latencies
// from a seeded generator. Unscripted frames simply contain no objects.
class MockDetector : public Detector {
 public:
  explicit MockDetector(MockDetectorConfig config = {});
  Result detect(const FrameRecord& frame) override;

 private:
  MockDetectorConfig config_;
  std::mutex mu_;
  std::mt19937_64 rng_;
};

struct PipelineOptions {
  double confidence_threshold = 0.5;
  std::string run_id = "default";
  std::size_t published_frames_cap = 256;
  // When set, every StageLatency is also appended as one JSON line.
  std::optional<std::filesystem::path> latency_log_path;
};

// The frame pipeline: authenticated intake -> detection -> threshold
// filtering -> object storage -> annotated-frame publication, with stage
// latencies logged per run.
class IngestPipeline {
 public:
  IngestPipeline(const auth::AuthRegistry& auth,
                 const tracking::DeviceRegistry& devices,
                 store::ObjectStore& object_store,
                 std::shared_ptr<Detector> detector,
                 PipelineOptions options = {});

  // Throws InvalidToken / UnknownDevice / NoPosition / DetectorFailure.
  AnnotatedFrame ingest_frame(const std::string& token,
                              const FrameRecord& frame);

  // All stage latencies of a run in ingestion order. Throws UnknownRun.
  std::vector<StageLatency> latency_log(const std::string& run_id) const;

  // Most recent published frames for one source device, oldest first.
  std::vector<AnnotatedFrame> recent_frames(const std::string& device_id) const;

  const PipelineOptions& options() const { return options_; }

 private:
  const auth::AuthRegistry& auth_;
  const tracking::DeviceRegistry& devices_;
  store::ObjectStore& object_store_;
  std::shared_ptr<Detector> detector_;
  PipelineOptions options_;

  mutable std::mutex mu_;
  std::map<std::string, std::vector<StageLatency>> runs_;
  std::map<std::string, std::deque<AnnotatedFrame>> published_;
  std::ofstream latency_file_;
};

struct LatencySummary {
  double mean_detection_ms = 0.0;
  double mean_filtering_ms = 0.0;
  double mean_total_ms = 0.0;
  std::size_t frames = 0;
};

// Throws ValidationError on an empty log: there is nothing to average.
LatencySummary summarize_latency(const std::vector<StageLatency>& log);

inline bool within_budget(const LatencySummary& s, double budget_ms) {
  return s.mean_total_ms <= budget_ms;
}

}  // namespace ldm::ingest
