// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/config.hpp"

#include <fstream>
#include <sstream>

#include "ldm/error.hpp"

namespace ldm::service {

using codec::json;

namespace {

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    fail(ErrorCode::ValidationError,
         std::string("config: '") + key + "' must be a number");
  }
  return j[key].get<double>();
}

std::int64_t int_or(const json& j, const char* key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    fail(ErrorCode::ValidationError,
         std::string("config: '") + key + "' must be an integer");
  }
  return j[key].get<std::int64_t>();
}

std::string string_or(const json& j, const char* key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) {
    fail(ErrorCode::ValidationError,
         std::string("config: '") + key + "' must be a string");
  }
  return j[key].get<std::string>();
}

}  // namespace

ServiceConfig config_from_json(const json& j) {
  codec::check_fields(j, "config", {},
                      {"host", "port", "ttl", "store", "offline_timeout_ms",
                       "proximity", "ingest", "latency", "detector"});
  ServiceConfig cfg;
  cfg.host = string_or(j, "host", cfg.host);
  cfg.port = static_cast<int>(int_or(j, "port", cfg.port));
  cfg.offline_timeout_ms = int_or(j, "offline_timeout_ms", cfg.offline_timeout_ms);

  if (j.contains("ttl")) {
    const auto& ttl = j["ttl"];
    codec::check_fields(ttl, "config.ttl", {},
                        {"highly_dynamic_ms", "transient_dynamic_ms",
                         "transient_static_ms"});
    cfg.store.ttls.highly_dynamic_ms =
        int_or(ttl, "highly_dynamic_ms", cfg.store.ttls.highly_dynamic_ms);
    cfg.store.ttls.transient_dynamic_ms =
        int_or(ttl, "transient_dynamic_ms", cfg.store.ttls.transient_dynamic_ms);
    cfg.store.ttls.transient_static_ms =
        int_or(ttl, "transient_static_ms", cfg.store.ttls.transient_static_ms);
    cfg.store.ttls.validate();
  }

  if (j.contains("store")) {
    const auto& s = j["store"];
    codec::check_fields(s, "config.store", {},
                        {"journal_path", "retention_horizon_ms",
                         "clock_skew_budget_ms"});
    if (s.contains("journal_path")) {
      cfg.store.journal_path = string_or(s, "journal_path", "");
    }
    cfg.store.retention_horizon_ms =
        int_or(s, "retention_horizon_ms", cfg.store.retention_horizon_ms);
    cfg.store.clock_skew_budget_ms =
        int_or(s, "clock_skew_budget_ms", cfg.store.clock_skew_budget_ms);
  }

  // Freshness tracks the HighlyDynamic TTL unless pinned explicitly.
  cfg.events.rule.freshness_ms = cfg.store.ttls.highly_dynamic_ms;
  if (j.contains("proximity")) {
    const auto& p = j["proximity"];
    codec::check_fields(p, "config.proximity", {},
                        {"radius_m", "classes", "freshness_ms",
                         "debounce_window_ms"});
    cfg.events.rule.radius_m = number_or(p, "radius_m", cfg.events.rule.radius_m);
    cfg.events.rule.freshness_ms =
        int_or(p, "freshness_ms", cfg.events.rule.freshness_ms);
    cfg.events.debounce_window_ms =
        int_or(p, "debounce_window_ms", cfg.events.debounce_window_ms);
    if (p.contains("classes")) {
      if (!p["classes"].is_array()) {
        fail(ErrorCode::ValidationError, "config: proximity.classes must be an array");
      }
      cfg.events.rule.classes.clear();
      for (const auto& c : p["classes"]) {
        if (!c.is_string()) {
          fail(ErrorCode::ValidationError,
               "config: proximity.classes entries must be strings");
        }
        cfg.events.rule.classes.insert(c.get<std::string>());
      }
    }
  }

  if (j.contains("ingest")) {
    const auto& i = j["ingest"];
    codec::check_fields(i, "config.ingest", {},
                        {"confidence_threshold", "run_id"});
    cfg.ingest.confidence_threshold =
        number_or(i, "confidence_threshold", cfg.ingest.confidence_threshold);
    cfg.ingest.run_id = string_or(i, "run_id", cfg.ingest.run_id);
  }

  if (j.contains("latency")) {
    const auto& l = j["latency"];
    codec::check_fields(l, "config.latency", {}, {"budget_ms", "log_path"});
    cfg.latency_budget_ms = number_or(l, "budget_ms", cfg.latency_budget_ms);
    if (l.contains("log_path")) {
      cfg.ingest.latency_log_path = string_or(l, "log_path", "");
    }
  }

  if (j.contains("detector")) {
    const auto& d = j["detector"];
    codec::check_fields(d, "config.detector", {},
                        {"detection_ms", "filtering_ms", "jitter_ms", "seed",
                         "script_path"});
    cfg.detector.detection_ms = number_or(d, "detection_ms", cfg.detector.detection_ms);
    cfg.detector.filtering_ms = number_or(d, "filtering_ms", cfg.detector.filtering_ms);
    cfg.detector.jitter_ms = number_or(d, "jitter_ms", cfg.detector.jitter_ms);
    cfg.detector.seed = static_cast<std::uint64_t>(int_or(d, "seed", 0));
    if (d.contains("script_path")) {
      const std::string path = string_or(d, "script_path", "");
      std::ifstream in(path);
      if (!in) {
        fail(ErrorCode::ValidationError,
             "config: cannot read detector script: " + path);
      }
      std::stringstream buf;
      buf << in.rdbuf();
      const json script = codec::parse(buf.str());
      if (!script.is_object()) {
        fail(ErrorCode::ValidationError,
             "config: detector script must map frame ids to detections");
      }
      for (const auto& [frame_id, detections] : script.items()) {
        std::vector<ingest::Detection> list;
        for (const auto& det : detections) {
          list.push_back(codec::detection_from_json(det));
        }
        cfg.detector.script[frame_id] = std::move(list);
      }
    }
  }

  return cfg;
}

ServiceConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::ValidationError, "cannot read config: " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(codec::parse(buf.str()));
}

}  // namespace ldm::service
