// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetsim/error.hpp"

namespace hetsim {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankOutOfModule: return "RankOutOfModule";
    case ErrorCode::CoordOutOfBounds: return "CoordOutOfBounds";
    case ErrorCode::IndivisibleBatch: return "IndivisibleBatch";
    case ErrorCode::PartialOverlap: return "PartialOverlap";
    case ErrorCode::NonIntegerFan: return "NonIntegerFan";
    case ErrorCode::PlanInfeasible: return "PlanInfeasible";
    case ErrorCode::ShardIntervalMismatch: return "ShardIntervalMismatch";
    case ErrorCode::MissingSourceShard: return "MissingSourceShard";
    case ErrorCode::GradIntervalMismatch: return "GradIntervalMismatch";
    case ErrorCode::UnknownMicrobatch: return "UnknownMicrobatch";
    case ErrorCode::Deadlock: return "Deadlock";
    case ErrorCode::GroupMismatch: return "GroupMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::SnapshotWhileActive: return "SnapshotWhileActive";
    case ErrorCode::DivisibilityViolation: return "DivisibilityViolation";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::InfeasibleSchedule: return "InfeasibleSchedule";
    case ErrorCode::NotColocated: return "NotColocated";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace hetsim
