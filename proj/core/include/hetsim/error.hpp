// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hetsim {

/// Failure categories surfaced by the simulator. Each maps to one
/// well-defined precondition or runtime contract.
enum class ErrorCode {
  RankOutOfModule,
  CoordOutOfBounds,
  IndivisibleBatch,
  PartialOverlap,
  NonIntegerFan,
  PlanInfeasible,
  ShardIntervalMismatch,
  MissingSourceShard,
  GradIntervalMismatch,
  UnknownMicrobatch,
  Deadlock,
  GroupMismatch,
  ShapeMismatch,
  ChannelMismatch,
  SnapshotWhileActive,
  DivisibilityViolation,
  CyclicGraph,
  DanglingEdge,
  InfeasibleSchedule,
  NotColocated,
  StructureMismatch,
  ParseError,
  ValidationError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class SimError : public std::runtime_error {
 public:
  SimError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw SimError(code, message);
}

}  // namespace hetsim
