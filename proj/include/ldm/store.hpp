// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ldm/geo.hpp"
#include "ldm/types.hpp"

namespace ldm::store {

// The four LDM data classes, ordered from never-expiring to most volatile.
enum class LayerKind {
  PermanentStatic,
  TransientStatic,
  TransientDynamic,
  HighlyDynamic,
};

// Validity windows per layer. PermanentStatic has no window at all, so its
// TTL is represented as "absent". Values must strictly increase from
// HighlyDynamic upward.
struct LayerTtls {
  TimestampMs highly_dynamic_ms = 2'000;
  TimestampMs transient_dynamic_ms = 300'000;
  TimestampMs transient_static_ms = 86'400'000;

  std::optional<TimestampMs> validity_ttl(LayerKind layer) const;
  void validate() const;
};

/// One timestamped, geolocated, classified object state in one LDM layer.
struct MapObject {
  std::string object_id;
  std::string object_class;  // e.g. "car", "cyclist", "pedestrian"
  geo::GeoPoint position;
  TimestampMs timestamp = 0;
  LayerKind layer = LayerKind::HighlyDynamic;
  std::string source_device;
  double confidence = 1.0;
  std::map<std::string, std::string> attributes;
};

struct BoundingBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(const geo::GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon &&
           p.lon <= max_lon;
  }
};

/// Reconstructed map state: at most one object state per object_id, each
/// with timestamp <= at and still within its layer's validity window.
struct MapSnapshot {
  TimestampMs at = 0;
  std::vector<MapObject> objects;
};

struct StoreOptions {
  LayerTtls ttls;
  TimestampMs clock_skew_budget_ms = 5'000;
  TimestampMs retention_horizon_ms = 86'400'000;
  // When set, every accepted insert is appended as one JSON line and the
  // file is replayed on construction.
  std::optional<std::filesystem::path> journal_path;
};

// Append-only per-object history with snapshot-at-t reconstruction.
// Multiple readers may query concurrently; writes take the exclusive lock,
// so a snapshot never observes a partially applied insert.
class ObjectStore {
 public:
  explicit ObjectStore(StoreOptions options = {},
                       Clock clock = system_clock_ms);

  // Appends a state; duplicate (object_id, timestamp) replaces the prior
  // state (last-writer-wins). Returns the per-object version id.
  // Throws ValidationError / FutureTimestamp.
  std::uint64_t insert_object(const MapObject& obj);

  MapSnapshot query_at(
      TimestampMs at, const std::optional<BoundingBox>& region = {},
      const std::optional<std::set<LayerKind>>& layers = {}) const;

  // All states of one object in [from, to], ascending by timestamp.
  // Throws UnknownObject / ValidationError.
  std::vector<MapObject> object_history(const std::string& object_id,
                                        TimestampMs from,
                                        TimestampMs to) const;

  // Drops states older than the retention horizon, keeping the latest
  // state of static-layer objects. Returns the number of purged states.
  std::size_t compact(TimestampMs now);

  void flush();

  const LayerTtls& ttls() const { return options_.ttls; }
  const StoreOptions& options() const { return options_; }

 private:
  struct VersionedState {
    MapObject object;
    std::uint64_t version = 0;
  };
  struct History {
    std::vector<VersionedState> states;  // sorted by timestamp
    std::uint64_t next_version = 1;
  };

  std::uint64_t insert_locked(const MapObject& obj, bool journal);
  void replay_journal();

  StoreOptions options_;
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, History> objects_;
  std::ofstream journal_;
};

std::string_view layer_name(LayerKind layer);
LayerKind layer_from_name(std::string_view name);

}  // namespace ldm::store
