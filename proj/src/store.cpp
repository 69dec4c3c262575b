// Copyright (C) 2026 LDM Service Authors
// SPDX-License-Identifier: Apache-2.0

#include "ldm/store.hpp"

#include <algorithm>
#include <string>

#include "ldm/error.hpp"
#include "ldm/json_codec.hpp"

namespace ldm::store {

std::optional<TimestampMs> LayerTtls::validity_ttl(LayerKind layer) const {
  switch (layer) {
    case LayerKind::PermanentStatic: return std::nullopt;
    case LayerKind::TransientStatic: return transient_static_ms;
    case LayerKind::TransientDynamic: return transient_dynamic_ms;
    case LayerKind::HighlyDynamic: return highly_dynamic_ms;
  }
  return std::nullopt;
}

void LayerTtls::validate() const {
  if (highly_dynamic_ms <= 0 || transient_dynamic_ms <= 0 ||
      transient_static_ms <= 0) {
    fail(ErrorCode::ValidationError, "layer TTLs must be positive");
  }
  if (!(highly_dynamic_ms < transient_dynamic_ms &&
        transient_dynamic_ms < transient_static_ms)) {
    fail(ErrorCode::ValidationError,
         "layer TTLs must strictly increase from HighlyDynamic to "
         "TransientStatic");
  }
}

std::string_view layer_name(LayerKind layer) {
  switch (layer) {
    case LayerKind::PermanentStatic: return "permanent_static";
    case LayerKind::TransientStatic: return "transient_static";
    case LayerKind::TransientDynamic: return "transient_dynamic";
    case LayerKind::HighlyDynamic: return "highly_dynamic";
  }
  return "highly_dynamic";
}

LayerKind layer_from_name(std::string_view name) {
  if (name == "permanent_static") return LayerKind::PermanentStatic;
  if (name == "transient_static") return LayerKind::TransientStatic;
  if (name == "transient_dynamic") return LayerKind::TransientDynamic;
  if (name == "highly_dynamic") return LayerKind::HighlyDynamic;
  fail(ErrorCode::ValidationError, "unknown layer: " + std::string(name));
}

namespace {

void validate_object(const MapObject& obj) {
  if (obj.object_id.empty()) {
    fail(ErrorCode::ValidationError, "object_id must not be empty");
  }
  if (obj.object_class.empty()) {
    fail(ErrorCode::ValidationError, "class must not be empty");
  }
  geo::validate(obj.position);
  if (obj.timestamp < 0) {
    fail(ErrorCode::ValidationError, "timestamp must be >= 0");
  }
  if (!(obj.confidence >= 0.0 && obj.confidence <= 1.0)) {
    fail(ErrorCode::ValidationError,
         "confidence out of [0,1]: " + std::to_string(obj.confidence));
  }
}

}  // namespace

ObjectStore::ObjectStore(StoreOptions options, Clock clock)
    : options_(std::move(options)), clock_(std::move(clock)) {
  options_.ttls.validate();
  if (options_.journal_path) {
    replay_journal();
    journal_.open(*options_.journal_path, std::ios::app);
    if (!journal_) {
      fail(ErrorCode::ValidationError,
           "cannot open journal: " + options_.journal_path->string());
    }
  }
}

void ObjectStore::replay_journal() {
  std::ifstream in(*options_.journal_path);
  if (!in) return;  // nothing to replay yet
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const MapObject obj = codec::map_object_from_json(codec::parse(line));
      validate_object(obj);
      insert_locked(obj, /*journal=*/false);
    } catch (const LdmError& e) {
      fail(ErrorCode::MalformedLog,
           "journal line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::uint64_t ObjectStore::insert_locked(const MapObject& obj, bool journal) {
  History& history = objects_[obj.object_id];
  const std::uint64_t version = history.next_version++;

  auto pos = std::lower_bound(
      history.states.begin(), history.states.end(), obj.timestamp,
      [](const VersionedState& s, TimestampMs t) {
        return s.object.timestamp < t;
      });
  if (pos != history.states.end() && pos->object.timestamp == obj.timestamp) {
    // Same (object_id, timestamp): last writer wins.
    pos->object = obj;
    pos->version = version;
  } else {
    history.states.insert(pos, VersionedState{obj, version});
  }

  if (journal && journal_.is_open()) {
    journal_ << codec::to_json(obj).dump() << '\n';
    journal_.flush();
  }
  return version;
}

std::uint64_t ObjectStore::insert_object(const MapObject& obj) {
  validate_object(obj);
  const TimestampMs now = clock_();
  if (obj.timestamp > now + options_.clock_skew_budget_ms) {
    fail(ErrorCode::FutureTimestamp,
         "timestamp " + std::to_string(obj.timestamp) +
             " is beyond the clock skew budget (now=" + std::to_string(now) +
             ")");
  }
  std::unique_lock lock(mu_);
  return insert_locked(obj, /*journal=*/true);
}

MapSnapshot ObjectStore::query_at(
    TimestampMs at, const std::optional<BoundingBox>& region,
    const std::optional<std::set<LayerKind>>& layers) const {
  if (at < 0) fail(ErrorCode::ValidationError, "query time must be >= 0");

  std::shared_lock lock(mu_);
  MapSnapshot snapshot;
  snapshot.at = at;
  for (const auto& [id, history] : objects_) {
    // Latest state with timestamp <= at.
    auto pos = std::upper_bound(
        history.states.begin(), history.states.end(), at,
        [](TimestampMs t, const VersionedState& s) {
          return t < s.object.timestamp;
        });
    if (pos == history.states.begin()) continue;
    const MapObject& obj = std::prev(pos)->object;

    if (const auto ttl = options_.ttls.validity_ttl(obj.layer)) {
      if (obj.timestamp < at - *ttl) continue;  // expired at `at`
    }
    if (layers && !layers->contains(obj.layer)) continue;
    if (region && !region->contains(obj.position)) continue;
    snapshot.objects.push_back(obj);
  }
  // objects_ is an ordered map, so the snapshot is already sorted by id.
  return snapshot;
}

std::vector<MapObject> ObjectStore::object_history(
    const std::string& object_id, TimestampMs from, TimestampMs to) const {
  if (from > to) {
    fail(ErrorCode::ValidationError, "history window: from > to");
  }
  std::shared_lock lock(mu_);
  const auto it = objects_.find(object_id);
  if (it == objects_.end()) {
    fail(ErrorCode::UnknownObject, "unknown object: " + object_id);
  }
  std::vector<MapObject> out;
  for (const auto& state : it->second.states) {
    if (state.object.timestamp >= from && state.object.timestamp <= to) {
      out.push_back(state.object);
    }
  }
  return out;
}

std::size_t ObjectStore::compact(TimestampMs now) {
  const TimestampMs cutoff = now - options_.retention_horizon_ms;
  std::unique_lock lock(mu_);
  std::size_t purged = 0;
  for (auto it = objects_.begin(); it != objects_.end();) {
    auto& states = it->second.states;

    // A state older than the horizon may only go once it can no longer
    // influence any query_at(t) with t >= cutoff: either its validity
    // window closed before the cutoff, or a newer state at or before the
    // cutoff shadows it for every such t. Keeps in-retention snapshots
    // bit-stable across compaction; the latest state of a static-layer
    // object is never eligible (it neither expires nor is shadowed).
    std::vector<VersionedState> kept;
    kept.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
      const MapObject& obj = states[i].object;
      bool removable = obj.timestamp < cutoff;
      if (removable) {
        bool invisible = false;
        if (const auto ttl = options_.ttls.validity_ttl(obj.layer)) {
          invisible = obj.timestamp + *ttl < cutoff;
        }
        const bool shadowed =
            i + 1 < states.size() &&
            states[i + 1].object.timestamp <= cutoff;
        removable = invisible || shadowed;
      }
      if (removable) {
        ++purged;
      } else {
        kept.push_back(std::move(states[i]));
      }
    }
    states = std::move(kept);
    if (states.empty()) {
      it = objects_.erase(it);
    } else {
      ++it;
    }
  }
  return purged;
}

void ObjectStore::flush() {
  std::unique_lock lock(mu_);
  if (journal_.is_open()) journal_.flush();
}

}  // namespace ldm::store
