// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "hetsim/error.hpp"

namespace hetsim::grid {

/// A module's logical parallel grid plus its physical rank placement.
/// The module occupies the contiguous virtual ranks
/// [rank_offset, rank_offset + tp*cp*pp*dp).
struct ModuleLayout {
  std::string name;
  int tp = 1;
  int cp = 1;
  int pp = 1;
  int dp = 1;
  int rank_offset = 0;

  int world_size() const { return tp * cp * pp * dp; }
  int rank_begin() const { return rank_offset; }
  int rank_end() const { return rank_offset + world_size(); }
  bool contains(int rank) const { return rank >= rank_begin() && rank < rank_end(); }

  /// Throws InvalidArgument unless all sizes are >= 1 and the offset is >= 0.
  void validate() const;
};

/// Position of a rank inside a module's logical grid.
struct GridCoord {
  int tp_idx = 0;
  int cp_idx = 0;
  int pp_idx = 0;
  int dp_idx = 0;

  bool operator==(const GridCoord&) const = default;
};

/// Contiguous run of global sample indices: [start, start + length).
struct BatchInterval {
  int start = 0;
  int length = 0;

  int end() const { return start + length; }
  bool operator==(const BatchInterval&) const = default;
};

/// An activation edge between two modules. `global_batch` is the sample
/// count carried per transform invocation and `feature_width` the number
/// of payload elements per sample.
struct BoundaryEdge {
  ModuleLayout source;
  ModuleLayout dest;
  int global_batch = 0;
  int feature_width = 0;
};

enum class Placement { Colocated, NonColocated };

/// Inverse of rank_of_coord. Enumeration order is fixed: tp varies fastest,
/// then cp, then dp, then pp.
GridCoord coord_of_rank(const ModuleLayout& layout, int rank);

/// rank_offset + linearization of the coordinate under the fixed order.
int rank_of_coord(const ModuleLayout& layout, const GridCoord& coord);

/// Splits [0, B) into dp equal, ordered, contiguous intervals.
std::vector<BatchInterval> partition_batch(int batch, int dp);

/// The rank holding canonical (tp=0, cp=0) coordinates for a (pp, dp) cell.
/// Both endpoints of an edge compute the same value from the layout alone.
int leader_rank(const ModuleLayout& layout, int pp_idx, int dp_idx);

/// Colocated iff the two rank ranges are identical, NonColocated iff they
/// are disjoint. Anything in between is rejected as PartialOverlap.
Placement placement_of_edge(const BoundaryEdge& edge);

/// All ranks of one pipeline stage, ascending.
std::vector<int> ranks_of_stage(const ModuleLayout& layout, int pp_idx);

/// The tp*cp replica ranks of one (pp, dp) cell, ascending. The first entry
/// is the cell's leader.
std::vector<int> replica_group(const ModuleLayout& layout, int pp_idx, int dp_idx);

/// Replica position of a coordinate inside its (pp, dp) cell.
inline int replica_position(const ModuleLayout& layout, const GridCoord& c) {
  return c.cp_idx * layout.tp + c.tp_idx;
}

std::string to_string(const BatchInterval& iv);

}  // namespace hetsim::grid
