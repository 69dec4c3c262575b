// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/api.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <limits>
#include <optional>

#include <httplib.h>

#include "ldm/error.hpp"
#include "ldm/json_codec.hpp"

namespace ldm::api {

using codec::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const LdmError& e) {
  const int status = http_status(e.code());
  send_json(res, status,
            json{{"http_status", status},
                 {"code", std::string(error_code_name(e.code()))},
                 {"message", e.what()}});
}

using Handler =
    std::function<void(const httplib::Request&, httplib::Response&)>;

// Every handler reports failures through LdmError; anything else is a bug
// and surfaces as a 500.
Handler guarded(Handler inner) {
  return [inner = std::move(inner)](const httplib::Request& req,
                                    httplib::Response& res) {
    try {
      inner(req, res);
    } catch (const LdmError& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_json(res, 500,
                json{{"http_status", 500},
                     {"code", "internal_error"},
                     {"message", e.what()}});
    }
  };
}

std::string bearer_token(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() ||
      header.compare(0, prefix.size(), prefix) != 0) {
    fail(ErrorCode::InvalidToken, "missing bearer token");
  }
  return header.substr(prefix.size());
}

std::int64_t parse_int_param(const httplib::Request& req, const char* name) {
  const std::string raw = req.get_param_value(name);
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
    fail(ErrorCode::BadRequest,
         std::string("query parameter '") + name + "' must be an integer");
  }
  return value;
}

std::int64_t int_param_or(const httplib::Request& req, const char* name,
                          std::int64_t fallback) {
  if (!req.has_param(name)) return fallback;
  return parse_int_param(req, name);
}

double parse_double_param(const httplib::Request& req, const char* name) {
  const std::string raw = req.get_param_value(name);
  try {
    std::size_t consumed = 0;
    const double value = std::stod(raw, &consumed);
    if (consumed != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    fail(ErrorCode::BadRequest,
         std::string("query parameter '") + name + "' must be a number");
  }
}

std::optional<double> number_or_null(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) {
    fail(ErrorCode::ValidationError,
         std::string("field '") + key + "' must be a number");
  }
  return j[key].get<double>();
}

}  // namespace

ApiServer::ApiServer(service::LdmService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::install_routes() {
  auto& srv = *server_;

  srv.Post("/v1/subscribe", guarded([this](const httplib::Request& req,
                                           httplib::Response& res) {
    const json body = codec::parse(req.body);
    codec::check_fields(body, "subscribe", {"kind"}, {"device_id", "region"});
    const DeviceKind kind =
        tracking::kind_from_name(body.at("kind").get<std::string>());
    std::optional<std::string> device_id;
    if (body.contains("device_id")) {
      device_id = body.at("device_id").get<std::string>();
    }
    std::optional<std::string> region;
    if (body.contains("region")) {
      region = body.at("region").get<std::string>();
    }
    const auto result = service_.subscribe(kind, device_id, region);
    send_json(res, 200,
              json{{"device_id", result.device_id}, {"token", result.token}});
  }));

  srv.Post(R"(/v1/devices/([^/]+)/location)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const std::string device_id = req.matches[1];
             const std::string token = bearer_token(req);
             if (service_.verify(token) != device_id) {
               fail(ErrorCode::InvalidToken,
                    "token is not bound to device " + device_id);
             }
             const json body = codec::parse(req.body);
             codec::check_fields(body, "location", {"lat", "lon", "at"},
                                 {"alt"});
             geo::GeoPoint pos;
             pos.lat = body.at("lat").get<double>();
             pos.lon = body.at("lon").get<double>();
             pos.alt = number_or_null(body, "alt");
             if (!body.at("at").is_number_integer()) {
               fail(ErrorCode::ValidationError, "'at' must be an integer");
             }
             const auto emitted =
                 service_.update_location(device_id, pos, body.at("at").get<TimestampMs>());
             send_json(res, 200, json{{"ok", true}, {"events", emitted.size()}});
           }));

  srv.Post("/v1/frames", guarded([this](const httplib::Request& req,
                                        httplib::Response& res) {
    const std::string token = bearer_token(req);
    service_.verify(token);  // reject before decoding state-changing input
    const ingest::FrameRecord frame =
        codec::frame_record_from_json(codec::parse(req.body));
    const auto annotated = service_.ingest_frame(token, frame);
    send_json(res, 200, codec::to_json(annotated));
  }));

  srv.Get("/v1/map", guarded([this](const httplib::Request& req,
                                    httplib::Response& res) {
    service_.verify(bearer_token(req));
    if (!req.has_param("at")) {
      fail(ErrorCode::BadRequest, "query parameter 'at' is required");
    }
    const TimestampMs at = parse_int_param(req, "at");

    std::optional<store::BoundingBox> region;
    const bool any_bound = req.has_param("min_lat") || req.has_param("min_lon") ||
                           req.has_param("max_lat") || req.has_param("max_lon");
    if (any_bound) {
      if (!(req.has_param("min_lat") && req.has_param("min_lon") &&
            req.has_param("max_lat") && req.has_param("max_lon"))) {
        fail(ErrorCode::BadRequest,
             "region queries need all of min_lat, min_lon, max_lat, max_lon");
      }
      region = store::BoundingBox{
          parse_double_param(req, "min_lat"), parse_double_param(req, "min_lon"),
          parse_double_param(req, "max_lat"), parse_double_param(req, "max_lon")};
    }

    std::optional<std::set<store::LayerKind>> layers;
    if (req.has_param("layers")) {
      layers.emplace();
      std::string raw = req.get_param_value("layers");
      std::size_t start = 0;
      while (start <= raw.size()) {
        const std::size_t comma = raw.find(',', start);
        const std::string name =
            raw.substr(start, comma == std::string::npos ? std::string::npos
                                                         : comma - start);
        if (!name.empty()) layers->insert(store::layer_from_name(name));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    send_json(res, 200, codec::to_json(service_.query_at(at, region, layers)));
  }));

  srv.Get("/v1/devices", guarded([this](const httplib::Request& req,
                                        httplib::Response& res) {
    service_.verify(bearer_token(req));
    json out = json::array();
    for (const auto& view : service_.list_devices()) {
      out.push_back(codec::to_json(view));
    }
    send_json(res, 200, out);
  }));

  srv.Post("/v1/zones", guarded([this](const httplib::Request& req,
                                       httplib::Response& res) {
    service_.verify(bearer_token(req));
    events::GeofenceZone zone = codec::zone_from_json(codec::parse(req.body));
    const std::string id = service_.create_zone(std::move(zone));
    send_json(res, 200, json{{"zone_id", id}});
  }));

  srv.Get("/v1/zones", guarded([this](const httplib::Request& req,
                                      httplib::Response& res) {
    service_.verify(bearer_token(req));
    json out = json::array();
    for (const auto& zone : service_.list_zones()) {
      out.push_back(codec::to_json(zone));
    }
    send_json(res, 200, out);
  }));

  srv.Get("/v1/events", guarded([this](const httplib::Request& req,
                                       httplib::Response& res) {
    const std::string device_id = service_.verify(bearer_token(req));
    const auto after =
        static_cast<std::uint64_t>(int_param_or(req, "after", 0));
    const int wait_ms = static_cast<int>(std::clamp<std::int64_t>(
        int_param_or(req, "wait_ms", kMaxEventWaitMs), 0, kMaxEventWaitMs));
    json out = json::array();
    for (const auto& event :
         service_.poll_events_wait(device_id, after, wait_ms)) {
      out.push_back(codec::to_json(event));
    }
    send_json(res, 200, out);
  }));

  srv.Get(R"(/v1/objects/([^/]+)/history)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            service_.verify(bearer_token(req));
            const std::string object_id = req.matches[1];
            const TimestampMs from = int_param_or(req, "from", 0);
            const TimestampMs to = int_param_or(
                req, "to", std::numeric_limits<TimestampMs>::max());
            json out = json::array();
            for (const auto& obj :
                 service_.object_history(object_id, from, to)) {
              out.push_back(codec::to_json(obj));
            }
            send_json(res, 200, out);
          }));
}

bool ApiServer::start(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) return false;
  worker_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return true;
}

int ApiServer::start_any_port(const std::string& host) {
  const int port = server_->bind_to_any_port(host);
  if (port < 0) return -1;
  worker_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void ApiServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
  if (worker_.joinable()) worker_.join();
}

bool ApiServer::running() const { return server_ && server_->is_running(); }

}  // namespace ldm::api
