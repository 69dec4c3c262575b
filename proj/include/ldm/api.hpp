// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <thread>

#include "ldm/service.hpp"

namespace httplib {
class Server;
}

namespace ldm::api {

// HTTP/JSON boundary over LdmService. The API layer adds no semantics:
// handlers decode, delegate and encode, and LdmError codes map one-to-one
// onto {status, code} pairs.
class ApiServer {
 public:
  explicit ApiServer(service::LdmService& service);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds and serves on a background thread; false on bind failure.
  bool start(const std::string& host, int port);

  // Binds an ephemeral port (tests); returns the port or -1 on failure.
  int start_any_port(const std::string& host);

  void stop();
  bool running() const;

 private:
  void install_routes();
  void run(const std::string& what);

  service::LdmService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread worker_;
};

// Upper bound on the /v1/events long-poll wait.
inline constexpr int kMaxEventWaitMs = 25'000;

}  // namespace ldm::api
