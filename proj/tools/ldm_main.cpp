// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0
//
// Operator entry point. Exit codes are stable for scripting:
//   0 success, 1 runtime failure, 2 usage/parse error,
//   3 acceptance budget exceeded or scenario assertion failed.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "ldm/api.hpp"
#include "ldm/config.hpp"
#include "ldm/error.hpp"
#include "ldm/json_codec.hpp"
#include "ldm/metrics.hpp"
#include "ldm/service.hpp"
#include "ldm/sim.hpp"

namespace {

using ldm::codec::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

volatile std::sig_atomic_t g_stop_requested = 0;

void handle_stop_signal(int) { g_stop_requested = 1; }

int exit_code_for(const ldm::LdmError& e) {
  switch (e.code()) {
    case ldm::ErrorCode::ValidationError:
    case ldm::ErrorCode::MalformedLog:
    case ldm::ErrorCode::BadRequest:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

struct ServeArgs {
  std::string config_path;
  std::string host;
  int port = -1;
  std::string journal;
  std::int64_t ttl_highly_dynamic_ms = -1;
  double proximity_radius_m = -1.0;
  double confidence_threshold = -1.0;
  std::int64_t offline_timeout_ms = -1;
  double latency_budget_ms = -1.0;
  bool json_output = false;
};

int cmd_serve(const ServeArgs& args) {
  ldm::service::ServiceConfig cfg;
  if (!args.config_path.empty()) {
    cfg = ldm::service::load_config_file(args.config_path);
  }
  if (!args.host.empty()) cfg.host = args.host;
  if (args.port >= 0) cfg.port = args.port;
  if (!args.journal.empty()) cfg.store.journal_path = args.journal;
  if (args.ttl_highly_dynamic_ms >= 0) {
    cfg.store.ttls.highly_dynamic_ms = args.ttl_highly_dynamic_ms;
    cfg.events.rule.freshness_ms = args.ttl_highly_dynamic_ms;
  }
  if (args.proximity_radius_m >= 0.0) {
    cfg.events.rule.radius_m = args.proximity_radius_m;
  }
  if (args.confidence_threshold >= 0.0) {
    cfg.ingest.confidence_threshold = args.confidence_threshold;
  }
  if (args.offline_timeout_ms >= 0) {
    cfg.offline_timeout_ms = args.offline_timeout_ms;
  }
  if (args.latency_budget_ms >= 0.0) {
    cfg.latency_budget_ms = args.latency_budget_ms;
  }

  ldm::service::LdmService service(cfg);
  ldm::api::ApiServer server(service);
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  if (!server.start(cfg.host, cfg.port)) {
    std::cerr << "ldm: cannot bind " << cfg.host << ":" << cfg.port << "\n";
    return kExitRuntime;
  }
  if (args.json_output) {
    std::cout << json{{"serving", true}, {"host", cfg.host}, {"port", cfg.port}}
                     .dump()
              << std::endl;
  } else {
    std::cout << "ldm: serving on http://" << cfg.host << ":" << cfg.port
              << std::endl;
  }
  while (!g_stop_requested && server.running()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  service.flush();  // journal hits disk before we exit
  return kExitOk;
}

struct SimArgs {
  std::string scenario_path;
  std::string endpoint;
  bool assert_events = false;
  bool json_output = false;
};

int cmd_sim_run(const SimArgs& args) {
  ldm::sim::Scenario scenario;
  try {
    scenario = ldm::sim::load_scenario_file(args.scenario_path);
  } catch (const ldm::LdmError& e) {
    std::cerr << "ldm: " << e.what() << "\n";
    return kExitUsage;
  }

  ldm::sim::ScenarioTranscript transcript;
  try {
    transcript = ldm::sim::run_scenario(scenario, args.endpoint);
  } catch (const ldm::LdmError& e) {
    std::cerr << "ldm: " << e.what() << "\n";
    return kExitRuntime;
  }

  if (args.json_output) {
    json lines = json::array();
    for (const auto& line : transcript.lines) {
      lines.push_back(json::parse(line));
    }
    json events = json::array();
    for (const auto& e : transcript.events) {
      json entry = ldm::codec::to_json(e.event);
      entry["tick"] = e.tick;
      events.push_back(std::move(entry));
    }
    std::cout << json{{"name", scenario.name},
                      {"transcript", std::move(lines)},
                      {"events", std::move(events)}}
                     .dump()
              << "\n";
  } else {
    std::cout << transcript.text();
  }

  if (args.assert_events) {
    const std::string mismatch =
        ldm::sim::check_expectations(scenario, transcript);
    if (!mismatch.empty()) {
      std::cerr << "ldm: scenario assertion failed: " << mismatch << "\n";
      return kExitBudget;
    }
  }
  return kExitOk;
}

struct EvalArgs {
  std::string gt_path;
  std::string pred_path;
  std::string latency_path;
  double iou = 0.5;
  std::string group_by = "quality";
  bool json_output = false;
};

std::ifstream open_or_fail(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ldm::fail(ldm::ErrorCode::ValidationError, "cannot read file: " + path);
  }
  return in;
}

int cmd_eval(const EvalArgs& args) {
  std::vector<ldm::metrics::FrameAnnotation> gt;
  std::vector<ldm::metrics::FrameAnnotation> pred;
  std::vector<ldm::ingest::StageLatency> latency;
  std::vector<ldm::metrics::MetricsReport> reports;
  try {
    auto gt_in = open_or_fail(args.gt_path);
    gt = ldm::metrics::load_annotation_log(gt_in);
    auto pred_in = open_or_fail(args.pred_path);
    pred = ldm::metrics::load_annotation_log(pred_in);
    if (!args.latency_path.empty()) {
      auto latency_in = open_or_fail(args.latency_path);
      latency = ldm::metrics::load_latency_log(latency_in);
    }
    reports = ldm::metrics::run_eval(gt, pred, latency, args.iou, args.group_by);
  } catch (const ldm::LdmError& e) {
    std::cerr << "ldm: " << e.what() << "\n";
    return kExitUsage;
  }

  json out = json::array();
  for (const auto& r : reports) out.push_back(ldm::codec::to_json(r));
  if (!args.json_output) {
    std::cout << ldm::metrics::render_table(reports);
  }
  std::cout << out.dump() << "\n";
  return kExitOk;
}

struct LatencyArgs {
  std::string log_path;
  double budget_ms = 100.0;
  bool json_output = false;
};

int cmd_latency_report(const LatencyArgs& args) {
  std::vector<ldm::ingest::StageLatency> log;
  ldm::ingest::LatencySummary summary;
  try {
    auto in = open_or_fail(args.log_path);
    log = ldm::metrics::load_latency_log(in);
    summary = ldm::ingest::summarize_latency(log);  // empty -> usage error
  } catch (const ldm::LdmError& e) {
    std::cerr << "ldm: " << e.what() << "\n";
    return kExitUsage;
  }

  const bool ok = ldm::ingest::within_budget(summary, args.budget_ms);
  if (args.json_output) {
    std::cout << json{{"frames", summary.frames},
                      {"mean_detection_ms", summary.mean_detection_ms},
                      {"mean_filtering_ms", summary.mean_filtering_ms},
                      {"mean_total_ms", summary.mean_total_ms},
                      {"budget_ms", args.budget_ms},
                      {"within_budget", ok}}
                     .dump()
              << "\n";
  } else {
    std::cout << "frames:            " << summary.frames << "\n"
              << "mean detection_ms: " << summary.mean_detection_ms << "\n"
              << "mean filtering_ms: " << summary.mean_filtering_ms << "\n"
              << "mean total_ms:     " << summary.mean_total_ms << "\n"
              << "budget_ms:         " << args.budget_ms << "\n"
              << "within budget:     " << (ok ? "yes" : "no") << "\n";
  }
  return ok ? kExitOk : kExitBudget;
}

struct ZoneImportArgs {
  std::string zones_path;
  std::string endpoint;
  std::string token;
  bool json_output = false;
};

int cmd_zone_import(const ZoneImportArgs& args) {
  std::vector<ldm::events::GeofenceZone> zones;
  try {
    auto in = open_or_fail(args.zones_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const json doc = ldm::codec::parse(buf.str());
    if (doc.is_array()) {
      for (const auto& z : doc) zones.push_back(ldm::codec::zone_from_json(z));
    } else {
      zones.push_back(ldm::codec::zone_from_json(doc));
    }
  } catch (const ldm::LdmError& e) {
    std::cerr << "ldm: " << e.what() << "\n";
    return kExitUsage;
  }

  httplib::Client client(args.endpoint);
  client.set_connection_timeout(5, 0);

  std::string token = args.token;
  if (token.empty()) {
    // Zone upload is authenticated like everything else; without an
    // operator token we subscribe a throwaway one.
    const auto result = client.Post("/v1/subscribe", json{{"kind", "vehicle"}}.dump(),
                                    "application/json");
    if (!result || result->status != 200) {
      std::cerr << "ldm: cannot reach endpoint " << args.endpoint << "\n";
      return kExitRuntime;
    }
    token = json::parse(result->body).at("token").get<std::string>();
  }

  httplib::Headers headers{{"Authorization", "Bearer " + token}};
  json created = json::array();
  json errors = json::array();
  for (const auto& zone : zones) {
    const auto result = client.Post("/v1/zones", headers,
                                    ldm::codec::to_json(zone).dump(),
                                    "application/json");
    if (!result) {
      std::cerr << "ldm: cannot reach endpoint " << args.endpoint << "\n";
      return kExitRuntime;
    }
    const json body = json::parse(result->body, nullptr, false);
    if (result->status == 200) {
      const std::string id = body.at("zone_id").get<std::string>();
      created.push_back(id);
      if (!args.json_output) std::cout << "created " << id << "\n";
    } else {
      json err{{"zone_id", zone.zone_id},
               {"status", result->status},
               {"error", body.is_discarded() ? json(result->body) : body}};
      errors.push_back(err);
      if (!args.json_output) {
        std::cout << "error " << zone.zone_id << ": " << err["error"].dump()
                  << "\n";
      }
    }
  }
  if (args.json_output) {
    std::cout << json{{"created", created}, {"errors", errors}}.dump() << "\n";
  }
  return errors.empty() ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local dynamic map service and tooling"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the LDM API service");
  serve->add_option("--config", serve_args.config_path, "JSON config file");
  serve->add_option("--host", serve_args.host, "Bind address");
  serve->add_option("--port", serve_args.port, "Bind port");
  serve->add_option("--journal", serve_args.journal, "Object journal file");
  serve->add_option("--ttl-highly-dynamic-ms", serve_args.ttl_highly_dynamic_ms,
                    "HighlyDynamic layer TTL");
  serve->add_option("--proximity-radius-m", serve_args.proximity_radius_m,
                    "Proximity alert radius");
  serve->add_option("--confidence-threshold", serve_args.confidence_threshold,
                    "Detection acceptance threshold");
  serve->add_option("--offline-timeout-ms", serve_args.offline_timeout_ms,
                    "Live/Offline cutoff");
  serve->add_option("--latency-budget-ms", serve_args.latency_budget_ms,
                    "Pipeline latency budget");
  serve->add_flag("--json", serve_args.json_output, "JSON ready line");

  SimArgs sim_args;
  auto* sim_cmd = app.add_subcommand("sim", "Scenario tools");
  sim_cmd->require_subcommand(1);
  auto* sim_run =
      sim_cmd->add_subcommand("run", "Replay a scenario against a service");
  sim_run->add_option("scenario", sim_args.scenario_path, "Scenario JSON file")
      ->required();
  sim_run->add_option("--endpoint", sim_args.endpoint, "Service base URL")
      ->required();
  sim_run->add_flag("--assert", sim_args.assert_events,
                    "Fail (exit 3) unless observed events match the "
                    "scenario's expected_events");
  sim_run->add_flag("--json", sim_args.json_output, "Single JSON document");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate detection logs");
  eval->add_option("--gt", eval_args.gt_path, "Ground-truth NDJSON log")
      ->required();
  eval->add_option("--pred", eval_args.pred_path, "Prediction NDJSON log")
      ->required();
  eval->add_option("--latency", eval_args.latency_path,
                   "Stage-latency NDJSON log");
  eval->add_option("--iou", eval_args.iou, "IoU matching threshold");
  eval->add_option("--group-by", eval_args.group_by, "'quality' or 'none'");
  eval->add_flag("--json", eval_args.json_output, "JSON only, no table");

  LatencyArgs latency_args;
  auto* latency =
      app.add_subcommand("latency-report", "Per-stage latency means");
  latency->add_option("--log", latency_args.log_path, "Stage-latency NDJSON log")
      ->required();
  latency->add_option("--budget-ms", latency_args.budget_ms,
                      "Mean total budget; exceeding it exits 3");
  latency->add_flag("--json", latency_args.json_output, "JSON output");

  ZoneImportArgs zone_args;
  auto* zone_cmd = app.add_subcommand("zone", "Geofence zone tools");
  zone_cmd->require_subcommand(1);
  auto* zone_import =
      zone_cmd->add_subcommand("import", "Upload zones from a JSON file");
  zone_import->add_option("zones", zone_args.zones_path, "Zones JSON file")
      ->required();
  zone_import->add_option("--endpoint", zone_args.endpoint, "Service base URL")
      ->required();
  zone_import->add_option("--token", zone_args.token,
                          "Bearer token (omit to auto-subscribe an operator)");
  zone_import->add_flag("--json", zone_args.json_output, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (serve->parsed()) return cmd_serve(serve_args);
    if (sim_run->parsed()) return cmd_sim_run(sim_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (latency->parsed()) return cmd_latency_report(latency_args);
    if (zone_import->parsed()) return cmd_zone_import(zone_args);
  } catch (const ldm::LdmError& e) {
    std::cerr << "ldm: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "ldm: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
