// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

namespace ldm {

// Milliseconds since the Unix epoch. All store contents, device fixes and
// events carry one; total order is the plain integer order.
using TimestampMs = std::int64_t;

// Injectable time source so tests and deterministic replays can pin "now".
using Clock = std::function<TimestampMs()>;

TimestampMs system_clock_ms();

enum class DeviceKind { Vehicle, Uav };

}  // namespace ldm
