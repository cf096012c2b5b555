// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hetsim/error.hpp"

namespace hetsim::simnet {

/// Deterministic virtual-rank message fabric.
///
/// Every rank runs a straight-line script on its own thread, but the fabric
/// admits exactly one runnable rank at a time and always advances the lowest
/// rank id. Each fabric call is a scheduling point, so for a fixed set of
/// scripts the interleaving, the event trace, and the ledger are identical
/// across runs. Sends are buffered and never block; receives and collectives
/// block until matched. If every unfinished rank is blocked the run aborts
/// with a Deadlock error that names the blocked wait-set.
///
/// Payload elements are 8-byte reals throughout; byte accounting follows.

using Payload = std::vector<double>;

constexpr int kNoMicrobatch = -1;

enum class Direction { None, Forward, Backward };

const char* direction_name(Direction d);

enum class EventKind { Send, Recv, CollectiveEnter, CollectiveExit, Note };

struct TraceEvent {
  long seq = 0;
  int rank = 0;
  EventKind kind = EventKind::Note;
  std::string label;
  std::string peer;  // "r<id>", "g[a,b,..]" or "-"
  int mb = kNoMicrobatch;
  long bytes = 0;
};

/// Ordered record of every fabric event. Byte-identical across runs of the
/// same configuration.
class EventTrace {
 public:
  void append(TraceEvent ev) { events_.push_back(std::move(ev)); }
  const std::vector<TraceEvent>& events() const { return events_; }
  /// One line per event: `seq rank event label peer mb bytes`.
  std::string render() const;

 private:
  std::vector<TraceEvent> events_;
};

/// Message and byte volume per (label, direction). Monotone; volume only,
/// no latency model.
class TrafficLedger {
 public:
  struct Entry {
    std::int64_t messages = 0;
    std::int64_t bytes = 0;
  };

  void add(const std::string& label, Direction dir, std::int64_t messages,
           std::int64_t bytes);
  Entry get(const std::string& label, Direction dir) const;
  std::int64_t total_messages() const;
  std::int64_t total_bytes() const;
  /// Sorted `label direction messages bytes` lines.
  std::string render() const;
  const std::map<std::pair<std::string, int>, Entry>& entries() const {
    return entries_;
  }

 private:
  std::map<std::pair<std::string, int>, Entry> entries_;
};

class World;

/// Per-rank handle passed to scripts. All calls must come from the owning
/// rank's script.
class Rank {
 public:
  int id() const { return id_; }

  void send(int dst, const std::string& label, int mb, Direction dir, Payload data);
  Payload recv(int src, const std::string& label, int mb, Direction dir);

  /// Root's payload on every member; (|group|-1) ledger messages.
  Payload broadcast(const std::vector<int>& group, int root, const std::string& label,
                    int mb, Direction dir, Payload data);
  /// Concatenation of member payloads in group order, on every member.
  Payload all_gather(const std::vector<int>& group, const std::string& label, int mb,
                     Direction dir, Payload data);
  /// Elementwise sum over the group, reduced in group order.
  Payload all_reduce(const std::vector<int>& group, const std::string& label, int mb,
                     Direction dir, Payload data);
  /// Synchronization only; no payload, no ledger traffic.
  void barrier(const std::vector<int>& group, const std::string& label);

  /// Emits a trace note for this rank. No communication.
  void note(const std::string& label, int mb = kNoMicrobatch);

 private:
  friend class World;
  Rank(World* w, int id) : world_(w), id_(id) {}
  World* world_;
  int id_;
};

using Script = std::function<void(Rank&)>;

/// A fixed-size world of virtual ranks. Scripts are registered per rank,
/// then run() drives them to completion under the deterministic scheduler.
class World {
 public:
  explicit World(int num_ranks);
  ~World();

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  int size() const { return num_ranks_; }
  void set_script(int rank, Script script);

  /// Runs every script to completion. Throws SimError(Deadlock) with the
  /// blocked wait-set if no progress is possible; rethrows the first script
  /// exception otherwise.
  void run();

  /// Quiescent snapshots. Throw SnapshotWhileActive during run().
  const TrafficLedger& ledger() const;
  const EventTrace& trace() const;

 private:
  friend class Rank;
  struct Impl;
  Impl* impl_;
  int num_ranks_;
};

}  // namespace hetsim::simnet
