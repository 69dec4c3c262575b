// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldm {

enum class ErrorCode {
  InvalidToken,
  DuplicateDevice,
  UnknownDevice,
  UnknownObject,
  UnknownRun,
  StaleUpdate,
  FutureTimestamp,
  ValidationError,
  DegeneratePolygon,
  NoPosition,
  FrameMismatch,
  MalformedLog,
  DetectorFailure,
  BadRequest,
  EndpointUnreachable,
  ScenarioAbort,
};

// Single error type used across modules. The API layer maps code() onto an
// HTTP status and a stable machine-readable code string.
class LdmError : public std::runtime_error {
 public:
  LdmError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Stable wire name, e.g. "invalid_token". Never renamed across releases.
std::string_view error_code_name(ErrorCode code);

int http_status(ErrorCode code);

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw LdmError(code, message);
}

}  // namespace ldm
