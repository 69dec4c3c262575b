// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/error.hpp"

#include <chrono>

#include "ldm/types.hpp"

namespace ldm {

TimestampMs system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch())
      .count();
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidToken: return "invalid_token";
    case ErrorCode::DuplicateDevice: return "duplicate_device";
    case ErrorCode::UnknownDevice: return "unknown_device";
    case ErrorCode::UnknownObject: return "unknown_object";
    case ErrorCode::UnknownRun: return "unknown_run";
    case ErrorCode::StaleUpdate: return "stale_update";
    case ErrorCode::FutureTimestamp: return "future_timestamp";
    case ErrorCode::ValidationError: return "validation_error";
    case ErrorCode::DegeneratePolygon: return "degenerate_polygon";
    case ErrorCode::NoPosition: return "no_position";
    case ErrorCode::FrameMismatch: return "frame_mismatch";
    case ErrorCode::MalformedLog: return "malformed_log";
    case ErrorCode::DetectorFailure: return "detector_failure";
    case ErrorCode::BadRequest: return "bad_request";
    case ErrorCode::EndpointUnreachable: return "endpoint_unreachable";
    case ErrorCode::ScenarioAbort: return "scenario_abort";
  }
  return "unknown_error";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidToken:
      return 401;
    case ErrorCode::DuplicateDevice:
      return 409;
    case ErrorCode::UnknownDevice:
    case ErrorCode::UnknownObject:
    case ErrorCode::UnknownRun:
      return 404;
    case ErrorCode::BadRequest:
      return 400;
    default:
      return 422;
  }
}

}  // namespace ldm
