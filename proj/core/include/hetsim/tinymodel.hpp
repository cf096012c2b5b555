// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hetsim/grid.hpp"
#include "hetsim/matrix.hpp"
#include "hetsim/simnet.hpp"

namespace hetsim::tinymodel {

/// Exact toy multimodal model: a two-layer encoder/projector MLP feeding
/// vision tokens into a pipeline of token-wise MLP "LLM" layers trained
/// against a dense regression target. Token-wise layers make context
/// sharding exact and keep every layout numerically comparable to the dense
/// single-rank reference.
///
/// Shapes per sample: encoder input d_in -> hidden d_enc -> S_v projected
/// vision tokens of width d_h; the token sequence has S positions, vision
/// tokens at [0, S_v) and text embeddings (taken from the batch) at the
/// rest. Every LLM layer is a column-parallel / row-parallel matrix pair
/// with one tensor-parallel all-reduce per direction.

enum class Activation { Identity, Tanh };

struct TinyModelSpec {
  int d_in = 6;
  int d_enc = 8;
  int d_h = 8;
  int seq_len = 6;           // S
  int vision_tokens = 2;     // S_v <= S
  int llm_layers_per_stage = 1;
  Activation activation = Activation::Tanh;
  double learning_rate = 1e-2;

  int text_tokens() const { return seq_len - vision_tokens; }
  int boundary_width() const { return vision_tokens * d_h; }

  /// Divisibility preconditions for a pair of module layouts.
  void validate_for(const grid::ModuleLayout& encoder,
                    const grid::ModuleLayout& llm) const;
};

/// Per-parameter-group trainability. The encoder flag covers the first
/// (encoder) matrix only; the projection matrix follows the projector flag
/// so the frozen-encoder protocol leaves it trainable.
struct TrainableFlags {
  bool encoder = true;
  bool projector = true;
  bool llm = true;
};

/// Full unsharded parameter set. Shards of every layout are slices of these
/// matrices, so equal seeds give identical underlying parameters everywhere.
struct FullParams {
  Matrix enc_w1;               // d_in x d_enc, column-parallel
  Matrix enc_w2;               // d_enc x S_v*d_h, row-parallel (projector)
  std::vector<Matrix> llm_a;   // d_h x d_h per layer, column-parallel
  std::vector<Matrix> llm_b;   // d_h x d_h per layer, row-parallel

  std::map<std::string, Matrix> named() const;
};

FullParams init_full_params(const TinyModelSpec& spec, int llm_layers_total,
                            std::uint64_t seed);

/// Deterministic training data: encoder inputs, text-token embeddings and
/// regression targets, one row per sample.
struct TrainBatch {
  int batch = 0;
  Matrix inputs;    // B x d_in
  Matrix text;      // B x (S-S_v)*d_h
  Matrix targets;   // B x S*d_h
};

TrainBatch make_batch(const TinyModelSpec& spec, int batch, std::uint64_t seed);

double apply_activation(Activation act, double x);
Matrix activate(Activation act, const Matrix& m);
/// Derivative expressed in terms of the activated value h = act(z).
Matrix activation_grad_from_output(Activation act, const Matrix& h);

/// Sum of squared errors plus the loss gradient 2*err/normalizer. The
/// caller supplies the averaging width (number of samples in the loss
/// scope times S*d_h is folded in by passing normalizer accordingly).
double loss_and_grad(const Matrix& out, const Matrix& target, double normalizer,
                     Matrix* grad);

/// Token positions [start, end) owned by one context-parallel rank.
grid::BatchInterval cp_token_slice(int seq_len, int cp, int cp_idx);

/// Builds the stage-0 token matrix for `n` samples: vision rows come from
/// the bridge payload (n x S_v*d_h), text rows from the batch rows
/// (n x (S-S_v)*d_h); only positions inside `slice` are materialized.
Matrix assemble_tokens(const TinyModelSpec& spec, const Matrix& vision_rows,
                       const Matrix& text_rows, const grid::BatchInterval& slice);

/// Splits a stage-0 token gradient back into a full-width vision-token
/// gradient (zeros outside this rank's slice). Text positions are data and
/// carry no gradient.
Matrix split_vision_grad(const TinyModelSpec& spec, const Matrix& token_grad,
                         const grid::BatchInterval& slice, int n_samples);

/// Slices per-sample targets down to one context slice, matching the row
/// layout of assemble_tokens output.
Matrix slice_targets(const TinyModelSpec& spec, const Matrix& target_rows,
                     const grid::BatchInterval& slice);

/// Encoder + projector shards and state for one rank. Forward/backward run
/// inside simnet scripts; activations are saved per caller-provided tag.
class EncoderRankModel {
 public:
  EncoderRankModel(const TinyModelSpec& spec, const grid::ModuleLayout& layout,
                   int rank, const FullParams& full);

  /// act(x*W1)*W2 with the row-parallel all-reduce over the tp group.
  Matrix forward(simnet::Rank& ctx, int tag, const Matrix& x_rows);
  /// Accumulates weight gradients for the saved activations of `tag`.
  void backward(int tag, const Matrix& d_out);

  /// Sums gradients over the data-parallel group, then applies SGD.
  void reduce_and_update(simnet::Rank& ctx, const TrainableFlags& trainable,
                         double lr);
  void zero_grads();

  const Matrix& w1_shard() const { return w1_; }
  const Matrix& w2_shard() const { return w2_; }
  const Matrix& w1_grad() const { return g_w1_; }
  const Matrix& w2_grad() const { return g_w2_; }
  const grid::GridCoord& coord() const { return coord_; }

 private:
  TinyModelSpec spec_;
  grid::ModuleLayout layout_;
  grid::GridCoord coord_;
  std::string label_;
  std::vector<int> tp_group_, grad_group_;
  Matrix w1_, w2_, g_w1_, g_w2_;
  struct Saved {
    Matrix x, h;
  };
  std::map<int, Saved> saved_;
};

/// The LLM layers of one pipeline stage on one rank.
class LlmStageRankModel {
 public:
  LlmStageRankModel(const TinyModelSpec& spec, const grid::ModuleLayout& layout,
                    int rank, const FullParams& full);

  Matrix forward(simnet::Rank& ctx, int tag, const Matrix& tokens);
  /// Returns the gradient w.r.t. the stage input.
  Matrix backward(simnet::Rank& ctx, int tag, const Matrix& d_out);

  void reduce_and_update(simnet::Rank& ctx, const TrainableFlags& trainable,
                         double lr);
  void zero_grads();

  int layer_begin() const { return layer_begin_; }
  int layer_count() const { return static_cast<int>(a_.size()); }
  const Matrix& a_shard(int local) const { return a_[local]; }
  const Matrix& b_shard(int local) const { return b_[local]; }
  const Matrix& a_grad(int local) const { return g_a_[local]; }
  const Matrix& b_grad(int local) const { return g_b_[local]; }
  const grid::GridCoord& coord() const { return coord_; }

 private:
  TinyModelSpec spec_;
  grid::ModuleLayout layout_;
  grid::GridCoord coord_;
  std::string label_;
  std::vector<int> tp_group_, grad_group_;
  int layer_begin_ = 0;
  std::vector<Matrix> a_, b_, g_a_, g_b_;
  struct Saved {
    std::vector<Matrix> inputs, hidden;
  };
  std::map<int, Saved> saved_;
};

}  // namespace hetsim::tinymodel
