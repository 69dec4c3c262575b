// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/sim.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "ldm/error.hpp"
#include "ldm/tracking.hpp"

namespace ldm::sim {

using codec::json;

Scenario scenario_from_json(const json& j) {
  codec::check_fields(j, "scenario",
                      {"name", "seed", "tick_ms", "duration_ms", "agents"},
                      {"zones", "expected_events"});
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.tick_ms = j.at("tick_ms").get<TimestampMs>();
  s.duration_ms = j.at("duration_ms").get<TimestampMs>();
  if (s.tick_ms <= 0) {
    fail(ErrorCode::ValidationError, "scenario: tick_ms must be > 0");
  }
  if (s.duration_ms < 0) {
    fail(ErrorCode::ValidationError, "scenario: duration_ms must be >= 0");
  }

  if (j.contains("zones")) {
    for (const auto& z : j.at("zones")) {
      s.zones.push_back(codec::zone_from_json(z));
    }
  }

  for (const auto& a : j.at("agents")) {
    codec::check_fields(a, "agent", {"device_id", "kind", "waypoints"},
                        {"region", "quality", "frames"});
    Agent agent;
    agent.device_id = a.at("device_id").get<std::string>();
    agent.kind = tracking::kind_from_name(a.at("kind").get<std::string>());
    if (a.contains("region")) {
      agent.region = a.at("region").get<std::string>();
    }
    if (a.contains("quality")) {
      agent.quality = a.at("quality").get<std::string>();
    }
    for (const auto& w : a.at("waypoints")) {
      codec::check_fields(w, "waypoint", {"lat", "lon", "at"}, {"alt"});
      Waypoint wp;
      wp.position.lat = w.at("lat").get<double>();
      wp.position.lon = w.at("lon").get<double>();
      if (w.contains("alt") && !w["alt"].is_null()) {
        wp.position.alt = w.at("alt").get<double>();
      }
      geo::validate(wp.position);
      wp.at = w.at("at").get<TimestampMs>();
      if (!agent.waypoints.empty() && wp.at <= agent.waypoints.back().at) {
        fail(ErrorCode::ValidationError,
             "agent " + agent.device_id +
                 ": waypoint timestamps must strictly increase");
      }
      agent.waypoints.push_back(wp);
    }
    if (agent.waypoints.empty()) {
      fail(ErrorCode::ValidationError,
           "agent " + agent.device_id + ": needs at least one waypoint");
    }
    if (a.contains("frames")) {
      const auto& frames = a.at("frames");
      if (!frames.is_object()) {
        fail(ErrorCode::ValidationError, "agent frames must be an object");
      }
      for (const auto& [tick_str, detections] : frames.items()) {
        int tick = 0;
        try {
          tick = std::stoi(tick_str);
        } catch (const std::exception&) {
          fail(ErrorCode::ValidationError,
               "agent frames: tick key must be an integer: " + tick_str);
        }
        std::vector<ingest::Detection> list;
        for (const auto& d : detections) {
          list.push_back(codec::detection_from_json(d));
        }
        agent.frames[tick] = std::move(list);
      }
    }
    s.agents.push_back(std::move(agent));
  }

  if (j.contains("expected_events")) {
    for (const auto& e : j.at("expected_events")) {
      codec::check_fields(e, "expected event", {"tick", "kind", "target_device"},
                          {"subject"});
      ExpectedEvent expected;
      expected.tick = e.at("tick").get<int>();
      expected.kind =
          events::event_kind_from_name(e.at("kind").get<std::string>());
      expected.target_device = e.at("target_device").get<std::string>();
      if (e.contains("subject")) {
        expected.subject = e.at("subject").get<std::string>();
      }
      s.expected_events.push_back(std::move(expected));
    }
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::ValidationError, "cannot read scenario: " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(codec::parse(buf.str()));
}

geo::GeoPoint interpolate_position(const std::vector<Waypoint>& waypoints,
                                   TimestampMs t) {
  if (waypoints.empty()) {
    fail(ErrorCode::ValidationError, "no waypoints to interpolate");
  }
  if (t <= waypoints.front().at) return waypoints.front().position;
  if (t >= waypoints.back().at) return waypoints.back().position;
  auto next = std::upper_bound(
      waypoints.begin(), waypoints.end(), t,
      [](TimestampMs value, const Waypoint& w) { return value < w.at; });
  const Waypoint& b = *next;
  const Waypoint& a = *std::prev(next);
  const double f = static_cast<double>(t - a.at) /
                   static_cast<double>(b.at - a.at);
  geo::GeoPoint p;
  p.lat = a.position.lat + f * (b.position.lat - a.position.lat);
  p.lon = a.position.lon + f * (b.position.lon - a.position.lon);
  if (a.position.alt && b.position.alt) {
    p.alt = *a.position.alt + f * (*b.position.alt - *a.position.alt);
  } else if (a.position.alt) {
    p.alt = a.position.alt;
  } else if (b.position.alt) {
    p.alt = b.position.alt;
  }
  return p;
}

std::string ScenarioTranscript::text() const {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

namespace {

json redact_tokens(json j) {
  if (j.is_object() && j.contains("token")) j["token"] = "<redacted>";
  return j;
}

struct AgentSession {
  std::string token;
  std::uint64_t cursor = 0;
};

class ScenarioRunner {
 public:
  ScenarioRunner(const Scenario& scenario, const std::string& endpoint)
      : scenario_(scenario), client_(endpoint) {
    client_.set_connection_timeout(5, 0);
    client_.set_read_timeout(30, 0);
  }

  ScenarioTranscript run() {
    subscribe_agents();
    create_zones();

    for (int tick = 0;; ++tick) {
      const TimestampMs t = scenario_.tick_ms * tick;
      if (t > scenario_.duration_ms) break;
      for (std::size_t i = 0; i < scenario_.agents.size(); ++i) {
        step_agent(tick, t, scenario_.agents[i], sessions_[i]);
      }
      for (std::size_t i = 0; i < scenario_.agents.size(); ++i) {
        poll_agent(tick, scenario_.agents[i], sessions_[i]);
      }
    }
    return std::move(transcript_);
  }

 private:
  json request(const std::string& method, const std::string& path,
               const std::optional<json>& body, const std::string& token) {
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    httplib::Result result;
    if (method == "POST") {
      result = client_.Post(path, headers, body ? body->dump() : "{}",
                            "application/json");
    } else {
      result = client_.Get(path, headers);
    }
    if (!result) {
      fail(ErrorCode::EndpointUnreachable,
           "request failed: " + method + " " + path + ": " +
               httplib::to_string(result.error()));
    }
    json parsed = json::parse(result->body, nullptr, false);
    if (parsed.is_discarded()) {
      fail(ErrorCode::ScenarioAbort,
           "non-JSON response from " + path + ": " + result->body);
    }
    if (result->status != 200) {
      fail(ErrorCode::ScenarioAbort,
           "unexpected status " + std::to_string(result->status) + " from " +
               path + ": " + parsed.dump());
    }
    return parsed;
  }

  void record(std::optional<int> tick, const std::string& agent,
              const std::string& action, const json& req, const json& res) {
    json line{{"agent", agent},
              {"action", action},
              {"request", redact_tokens(req)},
              {"response", redact_tokens(res)}};
    if (tick) line["tick"] = *tick;
    transcript_.lines.push_back(line.dump());
  }

  void subscribe_agents() {
    sessions_.resize(scenario_.agents.size());
    for (std::size_t i = 0; i < scenario_.agents.size(); ++i) {
      const Agent& agent = scenario_.agents[i];
      json body{{"kind", std::string(tracking::kind_name(agent.kind))},
                {"device_id", agent.device_id}};
      if (agent.region) body["region"] = *agent.region;
      const json response = request("POST", "/v1/subscribe", body, "");
      sessions_[i].token = response.at("token").get<std::string>();
      record(std::nullopt, agent.device_id, "subscribe", body, response);
    }
  }

  void create_zones() {
    if (scenario_.zones.empty()) return;
    // Zone upload needs a token; borrow the first agent's, or subscribe a
    // dedicated operator for agent-less scenarios.
    std::string token;
    std::string operator_id = "sim-operator";
    if (!sessions_.empty()) {
      token = sessions_.front().token;
      operator_id = scenario_.agents.front().device_id;
    } else {
      const json body{{"kind", "vehicle"}, {"device_id", operator_id}};
      const json response = request("POST", "/v1/subscribe", body, "");
      token = response.at("token").get<std::string>();
      record(std::nullopt, operator_id, "subscribe", body, response);
    }
    for (const auto& zone : scenario_.zones) {
      const json body = codec::to_json(zone);
      const json response = request("POST", "/v1/zones", body, token);
      record(std::nullopt, operator_id, "create_zone", body, response);
    }
  }

  void step_agent(int tick, TimestampMs t, const Agent& agent,
                  AgentSession& session) {
    const geo::GeoPoint pos = interpolate_position(agent.waypoints, t);
    json body{{"lat", pos.lat}, {"lon", pos.lon}, {"at", t}};
    if (pos.alt) body["alt"] = *pos.alt;
    const json response =
        request("POST", "/v1/devices/" + agent.device_id + "/location", body,
                session.token);
    record(tick, agent.device_id, "location", body, response);

    if (const auto it = agent.frames.find(tick); it != agent.frames.end()) {
      ingest::FrameRecord frame;
      frame.frame_id = agent.device_id + "-" + std::to_string(tick);
      frame.device_id = agent.device_id;
      frame.capture_ts = t;
      frame.quality = agent.quality;
      frame.payload_ref = "sim://" + frame.frame_id;
      frame.detections = it->second;
      const json body_frame = codec::to_json(frame);
      const json response_frame =
          request("POST", "/v1/frames", body_frame, session.token);
      record(tick, agent.device_id, "frame", body_frame, response_frame);
    }
  }

  void poll_agent(int tick, const Agent& agent, AgentSession& session) {
    const std::string path =
        "/v1/events?after=" + std::to_string(session.cursor) + "&wait_ms=0";
    const json response = request("GET", path, std::nullopt, session.token);
    record(tick, agent.device_id, "poll",
           json{{"after", session.cursor}, {"wait_ms", 0}}, response);
    for (const auto& e : response) {
      const events::Event event = codec::event_from_json(e);
      session.cursor = std::max(session.cursor, event.event_id);
      transcript_.events.push_back(ObservedEvent{tick, agent.device_id, event});
    }
  }

  const Scenario& scenario_;
  httplib::Client client_;
  std::vector<AgentSession> sessions_;
  ScenarioTranscript transcript_;
};

}  // namespace

ScenarioTranscript run_scenario(const Scenario& scenario,
                                const std::string& endpoint) {
  return ScenarioRunner(scenario, endpoint).run();
}

std::string check_expectations(const Scenario& scenario,
                               const ScenarioTranscript& transcript) {
  std::ostringstream os;
  const auto& expected = scenario.expected_events;
  const auto& observed = transcript.events;
  if (expected.size() != observed.size()) {
    os << "expected " << expected.size() << " events, observed "
       << observed.size();
    return os.str();
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const ExpectedEvent& want = expected[i];
    const ObservedEvent& got = observed[i];
    if (want.tick != got.tick || want.kind != got.event.kind ||
        want.target_device != got.event.target_device ||
        (want.subject && *want.subject != got.event.subject)) {
      os << "event " << i << " mismatch: expected {tick=" << want.tick
         << ", kind=" << events::event_kind_name(want.kind)
         << ", target=" << want.target_device;
      if (want.subject) os << ", subject=" << *want.subject;
      os << "} observed {tick=" << got.tick
         << ", kind=" << events::event_kind_name(got.event.kind)
         << ", target=" << got.event.target_device
         << ", subject=" << got.event.subject << "}";
      return os.str();
    }
  }
  return "";
}

}  // namespace ldm::sim
