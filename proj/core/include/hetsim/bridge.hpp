// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hetsim/grid.hpp"
#include "hetsim/simnet.hpp"

namespace hetsim::bridge {

/// Ownership-preserving layout transform for one boundary edge. The forward
/// pass materializes the source activation in the destination layout; the
/// backward pass returns gradients to the exact source owners through the
/// reverse of the same routes.
///
/// Non-colocated edges route every batch shard through a deterministic
/// leader (the rank with canonical tp=0, cp=0 coordinates on the boundary
/// stage); leaders perform all cross-boundary point-to-point transfers and
/// a local broadcast materializes the result on the remaining tp/cp ranks.
/// Colocated edges reinterpret the shared rank set: equal-DP shards are
/// rank-local, fan-in all-gathers the source slices that form one
/// destination shard, fan-out slices locally in forward and all-gathers
/// sibling gradients in backward. When pipeline depth makes boundary-stage
/// rank sets differ, an extra in-set delivery broadcast moves the already
/// assembled shard to its consumers; nothing ever crosses the shared set.
///
/// Gradient replica contract: destination tp replicas of one shard must
/// hand back identical gradients (the consuming module's tensor-parallel
/// backward has already reduced them); cp replicas hold position-disjoint
/// contributions and are summed here before routing.

enum class DpKind { Equal, FanIn, FanOut };

struct DpRelation {
  DpKind kind = DpKind::Equal;
  int factor = 1;  // k >= 2 for FanIn/FanOut, 1 for Equal
};

const char* dp_kind_name(DpKind k);

/// One rank-local batch shard: `payload` holds interval.length rows of
/// `feature_width` elements, row-major.
struct ShardedTensor {
  grid::BatchInterval interval;
  int feature_width = 0;
  std::vector<double> payload;

  void validate() const;
};

ShardedTensor make_shard(const grid::BatchInterval& iv, int width, double fill);

// --- non-colocated plan -----------------------------------------------------

struct NcRoute {
  int dest_shard = 0;
  int dest_leader = 0;
  // Ordered by batch: (source leader, carried interval).
  std::vector<std::pair<int, grid::BatchInterval>> pieces;
  std::vector<int> bcast_group;  // tp/cp replicas of the dest shard
};

struct NcSrcShard {
  int src_shard = 0;
  int src_leader = 0;
  grid::BatchInterval interval;
  std::vector<int> bcast_group;  // tp/cp replicas of the source shard
};

struct ReduceStep {
  std::vector<int> group;  // cp replicas at tp=0 of one dest shard
  int dest_shard = 0;
};

struct NcPlan {
  std::vector<NcRoute> routes;        // one per destination shard
  std::vector<NcSrcShard> src_shards; // one per source shard
  std::vector<ReduceStep> reduces;    // cp gradient reduction, when cp > 1
};

// --- colocated plan ----------------------------------------------------------

struct GatherStep {
  std::vector<int> members;  // group order = batch order
  std::vector<grid::BatchInterval> member_intervals;
  int shard = 0;  // forward: destination shard; backward: source shard
};

struct DeliverStep {
  int root = 0;
  std::vector<int> group;  // root first, then receivers ascending
  int shard = 0;
  grid::BatchInterval interval;
};

enum class ColoSource { OwnShard, OwnGrad, Gather, Deliver };

struct ColoAction {
  ColoSource from = ColoSource::OwnShard;
  int step = -1;  // index into the gather/deliver list when applicable
  grid::BatchInterval parent;  // interval of the payload the rank reads from
  grid::BatchInterval out;     // interval of the produced shard
};

struct ColoPlan {
  std::vector<GatherStep> fwd_gathers;
  std::vector<DeliverStep> fwd_delivers;
  std::map<int, ColoAction> fwd_actions;  // per destination-stage rank

  std::vector<ReduceStep> bwd_reduces;
  std::vector<GatherStep> bwd_gathers;
  std::vector<DeliverStep> bwd_delivers;
  std::map<int, ColoAction> bwd_actions;  // per source-stage rank
};

/// Compiled routing for one edge. Forward and backward reference the same
/// recorded intervals; construction is deterministic and placement-aware.
struct BridgePlan {
  grid::BoundaryEdge edge;
  grid::Placement placement = grid::Placement::NonColocated;
  DpRelation relation;
  std::string label;
  std::vector<grid::BatchInterval> src_intervals, dest_intervals;
  NcPlan nc;      // valid when placement == NonColocated
  ColoPlan colo;  // valid when placement == Colocated

  /// Cross-boundary leader transfers per microbatch per direction.
  int cross_boundary_messages() const;
};

DpRelation classify_dp_relation(const grid::BoundaryEdge& edge);
BridgePlan plan_bridge(const grid::BoundaryEdge& edge);

/// Structured-text export, one line per transfer/collective:
/// direction, endpoints, interval, byte count.
std::string export_plan(const BridgePlan& plan);

/// Per-rank execution of a plan plus (edge, microbatch) bookkeeping.
/// Forward records are consumed exactly once by backward.
class BridgeRuntime {
 public:
  explicit BridgeRuntime(const BridgePlan& plan) : plan_(&plan) {}

  // Non-colocated roles. Source-side calls run on the source module's last
  // stage, dest-side calls on the destination module's first stage.
  void forward_source(simnet::Rank& ctx, int mb, const ShardedTensor& shard);
  ShardedTensor forward_dest(simnet::Rank& ctx, int mb);
  void backward_dest(simnet::Rank& ctx, int mb, const ShardedTensor& grad);
  ShardedTensor backward_source(simnet::Rank& ctx, int mb);

  // Colocated transform; every shared rank calls both, passing its source
  // shard (forward) or destination gradient (backward) when it owns one.
  std::optional<ShardedTensor> forward_colocated(
      simnet::Rank& ctx, int mb, const std::optional<ShardedTensor>& src);
  std::optional<ShardedTensor> backward_colocated(
      simnet::Rank& ctx, int mb, const std::optional<ShardedTensor>& grad);

  /// Marks a forward record without executing (used by standalone backward).
  void seed_forward_record(int mb) { forward_done_.insert(mb); }

 private:
  void record_forward(int mb);
  void consume_forward(int mb);

  const BridgePlan* plan_;
  std::set<int> forward_done_, backward_done_;
};

/// Whole-edge operations for tests: run one transform over a fresh world.
/// Input maps are keyed by global rank; outputs land on every rank of the
/// receiving stage.
std::map<int, ShardedTensor> bridge_forward(const BridgePlan& plan,
                                            const std::map<int, ShardedTensor>& shards,
                                            int mb,
                                            simnet::TrafficLedger* ledger_out = nullptr);
std::map<int, ShardedTensor> bridge_backward(const BridgePlan& plan,
                                             const std::map<int, ShardedTensor>& grads,
                                             int mb,
                                             simnet::TrafficLedger* ledger_out = nullptr);

}  // namespace hetsim::bridge
