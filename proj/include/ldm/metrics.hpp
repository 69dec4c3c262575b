// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldm/geo.hpp"
#include "ldm/ingest.hpp"

namespace ldm::metrics {

enum class AnnotationRole { GroundTruth, Predicted };

struct AnnotatedBox {
  std::string object_class;
  geo::PixelBox bbox;
  std::optional<double> confidence;  // predictions only
};

struct FrameAnnotation {
  std::string frame_id;
  AnnotationRole role = AnnotationRole::GroundTruth;
  std::string label;  // grouping key, e.g. video quality "720p"
  std::vector<AnnotatedBox> boxes;
};

struct MatchCounts {
  std::size_t tp = 0;  // correct detections
  std::size_t fp = 0;  // incorrect detections
  std::size_t fn = 0;  // missed objects

  MatchCounts& operator+=(const MatchCounts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
};

// Greedy one-to-one matching: predictions in descending confidence order,
// each taking the unmatched same-class ground-truth box with the highest
// IoU >= iou_threshold (ties broken by ground-truth list order).
// Throws FrameMismatch when ids or roles do not line up, ValidationError
// for iou_threshold outside (0, 1].
MatchCounts match_frame(const FrameAnnotation& gt, const FrameAnnotation& pred,
                        double iou_threshold);

// tp / (tp + fp); empty denominator yields no value ("n/a"), never 0 or 1.
std::optional<double> precision(const MatchCounts& c);

// tp / (tp + fn), the true positive rate; same empty-denominator handling.
std::optional<double> recall(const MatchCounts& c);

struct MetricsReport {
  std::string label;
  MatchCounts counts;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> mean_detection_ms;
  std::optional<double> mean_filtering_ms;
  std::size_t frames = 0;
};

// Micro-averaged evaluation: per group label, counts are summed over all
// frames first and precision/recall computed on the sums. Predicted frames
// without a ground-truth frame count against zero ground-truth boxes, and
// vice versa. group_by is "quality" (the frame label) or "none".
std::vector<MetricsReport> run_eval(
    const std::vector<FrameAnnotation>& gt,
    const std::vector<FrameAnnotation>& pred,
    const std::vector<ingest::StageLatency>& latency, double iou_threshold,
    const std::string& group_by = "quality");

// NDJSON loader for ground-truth/prediction logs. Throws MalformedLog with
// the offending line number.
std::vector<FrameAnnotation> load_annotation_log(std::istream& in);

// NDJSON loader for stage-latency logs.
std::vector<ingest::StageLatency> load_latency_log(std::istream& in);

std::string render_table(const std::vector<MetricsReport>& reports);

std::string_view role_name(AnnotationRole role);
AnnotationRole role_from_name(std::string_view name);

}  // namespace ldm::metrics
