// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>

#include "ldm/error.hpp"
#include "ldm/json_codec.hpp"

namespace ldm::metrics {

std::string_view role_name(AnnotationRole role) {
  return role == AnnotationRole::GroundTruth ? "ground_truth" : "predicted";
}

AnnotationRole role_from_name(std::string_view name) {
  if (name == "ground_truth") return AnnotationRole::GroundTruth;
  if (name == "predicted") return AnnotationRole::Predicted;
  fail(ErrorCode::ValidationError, "unknown role: " + std::string(name));
}

MatchCounts match_frame(const FrameAnnotation& gt, const FrameAnnotation& pred,
                        double iou_threshold) {
  if (gt.frame_id != pred.frame_id) {
    fail(ErrorCode::FrameMismatch,
         "frame ids differ: " + gt.frame_id + " vs " + pred.frame_id);
  }
  if (gt.role != AnnotationRole::GroundTruth ||
      pred.role != AnnotationRole::Predicted) {
    fail(ErrorCode::FrameMismatch, "annotation roles are swapped or wrong");
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    fail(ErrorCode::ValidationError, "iou threshold must be in (0,1]");
  }

  // Predictions by descending confidence; stable so equal confidences keep
  // their input order.
  std::vector<std::size_t> order(pred.boxes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pred.boxes[a].confidence.value_or(0.0) >
           pred.boxes[b].confidence.value_or(0.0);
  });

  std::vector<bool> gt_matched(gt.boxes.size(), false);
  MatchCounts counts;
  for (const std::size_t pi : order) {
    const AnnotatedBox& p = pred.boxes[pi];
    double best_iou = 0.0;
    std::size_t best_gi = gt.boxes.size();
    for (std::size_t gi = 0; gi < gt.boxes.size(); ++gi) {
      if (gt_matched[gi]) continue;
      if (gt.boxes[gi].object_class != p.object_class) continue;
      const double overlap = geo::iou(gt.boxes[gi].bbox, p.bbox);
      if (overlap < iou_threshold) continue;
      // Strict > keeps the earliest ground-truth box on an IoU tie.
      if (overlap > best_iou) {
        best_iou = overlap;
        best_gi = gi;
      }
    }
    if (best_gi < gt.boxes.size()) {
      gt_matched[best_gi] = true;
      ++counts.tp;
    } else {
      ++counts.fp;
    }
  }
  counts.fn = gt.boxes.size() - counts.tp;
  return counts;
}

std::optional<double> precision(const MatchCounts& c) {
  const std::size_t denom = c.tp + c.fp;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::optional<double> recall(const MatchCounts& c) {
  const std::size_t denom = c.tp + c.fn;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(denom);
}

namespace {

struct FramePair {
  const FrameAnnotation* gt = nullptr;
  const FrameAnnotation* pred = nullptr;
};

FrameAnnotation empty_frame(const std::string& frame_id, AnnotationRole role,
                            const std::string& label) {
  FrameAnnotation f;
  f.frame_id = frame_id;
  f.role = role;
  f.label = label;
  return f;
}

}  // namespace

std::vector<MetricsReport> run_eval(
    const std::vector<FrameAnnotation>& gt,
    const std::vector<FrameAnnotation>& pred,
    const std::vector<ingest::StageLatency>& latency, double iou_threshold,
    const std::string& group_by) {
  if (group_by != "quality" && group_by != "none") {
    fail(ErrorCode::ValidationError, "group_by must be 'quality' or 'none'");
  }

  std::map<std::string, FramePair> frames;
  for (const auto& f : gt) {
    if (f.role != AnnotationRole::GroundTruth) {
      fail(ErrorCode::MalformedLog,
           "non-ground-truth record in gt log: " + f.frame_id);
    }
    if (frames[f.frame_id].gt) {
      fail(ErrorCode::MalformedLog, "duplicate gt frame: " + f.frame_id);
    }
    frames[f.frame_id].gt = &f;
  }
  for (const auto& f : pred) {
    if (f.role != AnnotationRole::Predicted) {
      fail(ErrorCode::MalformedLog,
           "non-predicted record in pred log: " + f.frame_id);
    }
    if (frames[f.frame_id].pred) {
      fail(ErrorCode::MalformedLog, "duplicate pred frame: " + f.frame_id);
    }
    frames[f.frame_id].pred = &f;
  }

  std::map<std::string, const ingest::StageLatency*> latency_by_frame;
  for (const auto& l : latency) latency_by_frame[l.frame_id] = &l;

  struct GroupAccumulator {
    MatchCounts counts;
    double detection_sum = 0.0;
    double filtering_sum = 0.0;
    std::size_t latency_frames = 0;
    std::size_t frames = 0;
  };
  std::map<std::string, GroupAccumulator> groups;

  for (const auto& [frame_id, pair] : frames) {
    const std::string label =
        group_by == "none"
            ? "all"
            : (pair.pred ? pair.pred->label
                         : (pair.gt ? pair.gt->label : ""));
    const FrameAnnotation gt_frame =
        pair.gt ? *pair.gt
                : empty_frame(frame_id, AnnotationRole::GroundTruth, label);
    const FrameAnnotation pred_frame =
        pair.pred ? *pair.pred
                  : empty_frame(frame_id, AnnotationRole::Predicted, label);

    GroupAccumulator& acc = groups[label];
    acc.counts += match_frame(gt_frame, pred_frame, iou_threshold);
    acc.frames += 1;
    if (const auto it = latency_by_frame.find(frame_id);
        it != latency_by_frame.end()) {
      acc.detection_sum += it->second->detection_ms;
      acc.filtering_sum += it->second->filtering_ms;
      acc.latency_frames += 1;
    }
  }

  std::vector<MetricsReport> reports;
  reports.reserve(groups.size());
  for (const auto& [label, acc] : groups) {
    MetricsReport report;
    report.label = label;
    report.counts = acc.counts;
    report.precision = precision(acc.counts);
    report.recall = recall(acc.counts);
    report.frames = acc.frames;
    if (acc.latency_frames > 0) {
      report.mean_detection_ms =
          acc.detection_sum / static_cast<double>(acc.latency_frames);
      report.mean_filtering_ms =
          acc.filtering_sum / static_cast<double>(acc.latency_frames);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<FrameAnnotation> load_annotation_log(std::istream& in) {
  std::vector<FrameAnnotation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(codec::frame_annotation_from_json(codec::parse(line)));
    } catch (const LdmError& e) {
      fail(ErrorCode::MalformedLog,
           "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ingest::StageLatency> load_latency_log(std::istream& in) {
  std::vector<ingest::StageLatency> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(codec::stage_latency_from_json(codec::parse(line)));
    } catch (const LdmError& e) {
      fail(ErrorCode::MalformedLog,
           "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

namespace {

std::string fmt_ratio(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << *v;
  return os.str();
}

std::string fmt_ms(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << *v;
  return os.str();
}

}  // namespace

std::string render_table(const std::vector<MetricsReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "label" << std::right << std::setw(8)
     << "frames" << std::setw(7) << "tp" << std::setw(7) << "fp"
     << std::setw(7) << "fn" << std::setw(11) << "precision" << std::setw(9)
     << "recall" << std::setw(13) << "det_ms" << std::setw(13) << "filt_ms"
     << '\n';
  for (const auto& r : reports) {
    os << std::left << std::setw(10) << r.label << std::right << std::setw(8)
       << r.frames << std::setw(7) << r.counts.tp << std::setw(7)
       << r.counts.fp << std::setw(7) << r.counts.fn << std::setw(11)
       << fmt_ratio(r.precision) << std::setw(9) << fmt_ratio(r.recall)
       << std::setw(13) << fmt_ms(r.mean_detection_ms) << std::setw(13)
       << fmt_ms(r.mean_filtering_ms) << '\n';
  }
  return os.str();
}

}  // namespace ldm::metrics
