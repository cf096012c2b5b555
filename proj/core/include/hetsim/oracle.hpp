// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hetsim/grid.hpp"
#include "hetsim/matrix.hpp"
#include "hetsim/tinymodel.hpp"

namespace hetsim::oracle {

/// Brute-force batch-shard mapping: assign each sample j to source shard
/// floor(j*dp_src/B) and destination shard floor(j*dp_dst/B), then group.
/// Returns, per destination shard, the ordered (source shard, interval)
/// list. Independent reference for bridge plan interval records.
std::vector<std::vector<std::pair<int, grid::BatchInterval>>> interval_oracle(
    int batch, int dp_src, int dp_dst);

/// Dense single-rank training state: full parameters, gradients of the last
/// step, and the last step's loss.
struct OracleState {
  tinymodel::FullParams params;
  tinymodel::FullParams grads;
  double loss = 0.0;
};

/// One dense training step over the full batch with nmb-way gradient
/// accumulation and an SGD update. Entirely sequential; no fabric.
OracleState oracle_step(const tinymodel::TinyModelSpec& spec,
                        const tinymodel::FullParams& params,
                        const tinymodel::TrainBatch& batch, int nmb,
                        const tinymodel::TrainableFlags& trainable);

/// Runs `steps` oracle steps from the canonical initialization, recording
/// the post-step state of each step.
std::vector<OracleState> oracle_run(const tinymodel::TinyModelSpec& spec,
                                    int llm_layers_total, std::uint64_t seed,
                                    const tinymodel::TrainBatch& batch, int nmb,
                                    int steps,
                                    const tinymodel::TrainableFlags& trainable);

/// Dense forward only: global loss for the given parameters. Used by
/// finite-difference checks.
double oracle_loss(const tinymodel::TinyModelSpec& spec,
                   const tinymodel::FullParams& params,
                   const tinymodel::TrainBatch& batch);

/// Step-level parity outcome: worst relative deviation per tensor plus the
/// scalar loss deviation, judged against one tolerance.
struct ParityReport {
  struct Item {
    std::string tensor;
    double max_rel = 0.0;
  };
  std::vector<Item> items;   // sorted worst-first
  double loss_rel = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  std::string render() const;
  /// One `parity tensor=<name> max_rel=<v> pass=<0|1>` line per tensor.
  std::string render_machine() const;
};

/// Compares two named tensor sets with |a-b| / max(1, |b|) elementwise.
/// Throws StructureMismatch when names or shapes disagree.
ParityReport parity_compare(const std::map<std::string, Matrix>& distributed,
                            const std::map<std::string, Matrix>& reference,
                            double distributed_loss, double reference_loss,
                            double tolerance);

}  // namespace hetsim::oracle
