// Copyright 2026 The DGN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dgn/data/batch.hpp"
#include "dgn/graph.hpp"
#include "dgn/tensor.hpp"

// Charge-conditioned term regressor.
//
// The gated encoder embeds the tokens, then applies `depth` blocks of
// (bidirectional LSTM -> charge gate), where the gate for position i is
// sigmoid(W [h_i; c] + b) applied elementwise to h_i and c is the embedding
// of the target charge. A bank of convolution filters of several widths,
// max-pooled over time, turns the sequence into a fixed vector z, and the
// head predicts ReLU(W_o z + b_o) months.
//
// Baseline encoders replace the gated stack: kCnn convolves the embeddings,
// kRnn concatenates the final bi-LSTM states, kRcnn convolves bi-LSTM
// states. When a baseline predicts per-charge terms, the charge embedding is
// appended to its document vector before the head.
//
// Sequences are handled in batches stored time-major: row t * B + b holds
// step t of sequence b.

namespace dgn::model {

enum class EncoderKind { kDgn, kCnn, kRnn, kRcnn };

std::string_view encoder_name(EncoderKind kind);
EncoderKind parse_encoder(std::string_view name);

struct DgnConfig {
  std::size_t vocab_size = 2;
  std::size_t charge_count = 1;
  std::size_t embed_dim = 64;
  std::size_t charge_dim = 32;
  std::size_t hidden_dim = 64;  // per direction
  std::size_t depth = 3;
  std::vector<std::size_t> filter_widths = {1, 2, 3, 4, 5};
  std::size_t filters = 32;  // per width
  std::uint64_t seed = 1;
  EncoderKind encoder = EncoderKind::kDgn;
  data::Target target = data::Target::kCharge;
  // Ablation: the gates see a zero vector instead of the charge embedding.
  bool charge_blind = false;

  void validate() const;
  std::size_t max_width() const { return filter_widths.back(); }
  std::size_t pooled_dim() const { return filters * filter_widths.size(); }

  friend bool operator==(const DgnConfig&, const DgnConfig&) = default;
};

// Gate order along the 4d axis: input, forget, candidate, output.
struct LstmParams {
  Parameter w_input;   // d_in x 4d
  Parameter w_hidden;  // d x 4d
  Parameter bias;      // 1 x 4d
};

struct BlockParams {
  LstmParams forward;
  LstmParams backward;
  Parameter gate_w;  // (2d + d_c) x 2d, so rows multiply [h; c]
  Parameter gate_b;  // 1 x 2d
};

struct ConvParams {
  std::size_t width = 1;
  Parameter filters;  // (width * channels) x F
  Parameter bias;     // 1 x F
};

// Graph views of parameter sets.
struct LstmVars {
  Var w_input, w_hidden, bias;
};
struct ConvVars {
  std::size_t width;
  Var filters, bias;
};

// Per-step row masks for a time-major batch: flags[t * B + b] is true when
// step t is a real token of sequence b.
std::vector<char> time_major_mask(const data::Batch& batch);

// --- building blocks, all batched and time-major ---

// Embedding rows for a time-major token layout.
Var embed_lookup(Graph& g, Var table, std::span<const std::size_t> tokens);

// One LSTM direction over `steps` steps of `batch` sequences. Padded steps
// carry the previous state forward unchanged (zero before the first real
// token when running backwards). Returns steps*batch x d hidden states.
// One LSTM step over a batch. `pre` holds the B x 4d gate pre-activations in
// the order input, forget, candidate, output; `state` is the previous B x 2d
// [h | c], or a default Var for the zero initial state. Rows whose `active`
// flag is false keep the previous state (an empty span means all active).
Var lstm_cell(Graph& g, Var pre, Var state, std::span<const char> active);

Var lstm_direction(Graph& g, Var x, std::size_t batch, std::size_t steps,
                   std::span<const char> step_mask, const LstmVars& p, bool reverse);

// [forward_t ; backward_t] per position: steps*batch x 2d.
Var bilstm_layer(Graph& g, Var x, std::size_t batch, std::size_t steps,
                 std::span<const char> step_mask, const LstmVars& fwd, const LstmVars& bwd);

// sigmoid([h; c] W + b) * h, with `charge_rows` holding one charge vector per
// row of h.
Var gate_layer(Graph& g, Var h_tilde, Var charge_rows, Var w, Var b);

// Window validity for width w over sequences of the given lengths: a window
// is used when it lies inside the real tokens; a sequence shorter than the
// window keeps only its first window, with padded rows read as zeros.
std::vector<char> window_mask(std::span<const std::size_t> lengths, std::size_t steps,
                              std::size_t width);

// Max-over-time pooled convolution features for every width, concatenated in
// width order: batch x (F * widths). Padded rows of h must already be zero.
Var conv_encode(Graph& g, Var h, std::size_t batch, std::size_t steps,
                std::span<const std::size_t> lengths, std::span<const ConvVars> convs);

class Model {
 public:
  explicit Model(DgnConfig config);

  const DgnConfig& config() const { return config_; }

  // Every trainable parameter in declaration order (also the checkpoint
  // order).
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;

  // B x 1 predictions with gradients flowing into the parameters.
  Var forward(Graph& g, const data::Batch& batch);
  // Inference only; parameters are read, never written.
  std::vector<double> predict(const data::Batch& batch) const;
  // Gated per-position representations after the last block
  // (steps*batch x 2d, time-major), for inspection and tests.
  Tensor encode_positions(const data::Batch& batch) const;
  // Single sequence, single charge.
  double predict_one(std::span<const std::size_t> tokens, std::size_t charge) const;

  void set_output_bias(double months);
  void zero_grad();

  Parameter word_embeddings;    // V x d_w
  Parameter charge_embeddings;  // C x d_c (absent for total-term baselines)
  std::vector<BlockParams> blocks;
  std::vector<ConvParams> convs;
  Parameter head_w;  // input x 1
  Parameter head_b;  // 1 x 1

 private:
  template <typename Leaf>
  Var build(Graph& g, const data::Batch& batch, Leaf leaf, Var* positions) const;

  DgnConfig config_;
};

// Binary checkpoint: magic, format version, the configuration, then every
// parameter (name, shape, float64 little-endian values) in declaration order.
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);
// Loads into an existing model; throws ConfigError when the stored
// configuration differs from model.config().
void load_checkpoint_into(Model& model, const std::filesystem::path& path);

}  // namespace dgn::model
