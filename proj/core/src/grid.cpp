// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetsim/grid.hpp"

#include <algorithm>

namespace hetsim::grid {

void ModuleLayout::validate() const {
  if (tp < 1 || cp < 1 || pp < 1 || dp < 1) {
    raise(ErrorCode::InvalidArgument,
          "module '" + name + "' has a parallel size < 1");
  }
  if (rank_offset < 0) {
    raise(ErrorCode::InvalidArgument,
          "module '" + name + "' has negative rank_offset");
  }
}

GridCoord coord_of_rank(const ModuleLayout& layout, int rank) {
  layout.validate();
  if (!layout.contains(rank)) {
    raise(ErrorCode::RankOutOfModule,
          "rank " + std::to_string(rank) + " outside module '" + layout.name +
              "' ranks [" + std::to_string(layout.rank_begin()) + ", " +
              std::to_string(layout.rank_end()) + ")");
  }
  int linear = rank - layout.rank_offset;
  GridCoord c;
  c.tp_idx = linear % layout.tp;
  linear /= layout.tp;
  c.cp_idx = linear % layout.cp;
  linear /= layout.cp;
  c.dp_idx = linear % layout.dp;
  linear /= layout.dp;
  c.pp_idx = linear;
  return c;
}

int rank_of_coord(const ModuleLayout& layout, const GridCoord& coord) {
  layout.validate();
  if (coord.tp_idx < 0 || coord.tp_idx >= layout.tp || coord.cp_idx < 0 ||
      coord.cp_idx >= layout.cp || coord.pp_idx < 0 || coord.pp_idx >= layout.pp ||
      coord.dp_idx < 0 || coord.dp_idx >= layout.dp) {
    raise(ErrorCode::CoordOutOfBounds,
          "coordinate outside module '" + layout.name + "' grid");
  }
  int linear = ((coord.pp_idx * layout.dp + coord.dp_idx) * layout.cp + coord.cp_idx) *
                   layout.tp +
               coord.tp_idx;
  return layout.rank_offset + linear;
}

std::vector<BatchInterval> partition_batch(int batch, int dp) {
  if (dp < 1) raise(ErrorCode::InvalidArgument, "dp must be >= 1");
  if (batch <= 0 || batch % dp != 0) {
    raise(ErrorCode::IndivisibleBatch,
          "batch " + std::to_string(batch) + " not divisible by dp " +
              std::to_string(dp));
  }
  const int shard = batch / dp;
  std::vector<BatchInterval> out;
  out.reserve(dp);
  for (int i = 0; i < dp; ++i) out.push_back({i * shard, shard});
  return out;
}

int leader_rank(const ModuleLayout& layout, int pp_idx, int dp_idx) {
  return rank_of_coord(layout, GridCoord{0, 0, pp_idx, dp_idx});
}

Placement placement_of_edge(const BoundaryEdge& edge) {
  edge.source.validate();
  edge.dest.validate();
  const int sb = edge.source.rank_begin(), se = edge.source.rank_end();
  const int db = edge.dest.rank_begin(), de = edge.dest.rank_end();
  if (sb == db && se == de) return Placement::Colocated;
  if (se <= db || de <= sb) return Placement::NonColocated;
  raise(ErrorCode::PartialOverlap,
        "modules '" + edge.source.name + "' [" + std::to_string(sb) + ", " +
            std::to_string(se) + ") and '" + edge.dest.name + "' [" +
            std::to_string(db) + ", " + std::to_string(de) +
            ") overlap without being identical");
}

std::vector<int> ranks_of_stage(const ModuleLayout& layout, int pp_idx) {
  std::vector<int> out;
  out.reserve(layout.tp * layout.cp * layout.dp);
  for (int d = 0; d < layout.dp; ++d)
    for (int c = 0; c < layout.cp; ++c)
      for (int t = 0; t < layout.tp; ++t)
        out.push_back(rank_of_coord(layout, GridCoord{t, c, pp_idx, d}));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> replica_group(const ModuleLayout& layout, int pp_idx, int dp_idx) {
  std::vector<int> out;
  out.reserve(layout.tp * layout.cp);
  for (int c = 0; c < layout.cp; ++c)
    for (int t = 0; t < layout.tp; ++t)
      out.push_back(rank_of_coord(layout, GridCoord{t, c, pp_idx, dp_idx}));
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_string(const BatchInterval& iv) {
  return "[" + std::to_string(iv.start) + "," + std::to_string(iv.end()) + ")";
}

}  // namespace hetsim::grid
