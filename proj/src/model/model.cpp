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

#include "dgn/model.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "dgn/error.hpp"
#include "dgn/random.hpp"

namespace dgn::model {

std::string_view encoder_name(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kDgn: return "dgn";
    case EncoderKind::kCnn: return "cnn";
    case EncoderKind::kRnn: return "rnn";
    case EncoderKind::kRcnn: return "rcnn";
  }
  return "?";
}

EncoderKind parse_encoder(std::string_view name) {
  for (EncoderKind k : {EncoderKind::kDgn, EncoderKind::kCnn, EncoderKind::kRnn, EncoderKind::kRcnn})
    if (encoder_name(k) == name) return k;
  throw ConfigError("unknown encoder '" + std::string(name) + "' (expected dgn, cnn, rnn or rcnn)");
}

void DgnConfig::validate() const {
  if (vocab_size < 2) throw ConfigError("vocabulary must hold at least the two reserved tokens");
  if (charge_count < 1) throw ConfigError("charge count must be at least 1");
  if (embed_dim < 1 || charge_dim < 1 || hidden_dim < 1 || filters < 1)
    throw ConfigError("all dimensions must be at least 1");
  if (depth < 1) throw ConfigError("depth must be at least 1");
  if (filter_widths.empty()) throw ConfigError("at least one filter width is required");
  for (std::size_t i = 0; i < filter_widths.size(); ++i) {
    if (filter_widths[i] < 1) throw ConfigError("filter widths must be positive");
    if (i > 0 && filter_widths[i] <= filter_widths[i - 1])
      throw ConfigError("filter widths must strictly increase");
  }
  if (charge_blind && encoder != EncoderKind::kDgn)
    throw ConfigError("the charge-blind ablation applies to the gated encoder only");
}

namespace {

void glorot_fill(Tensor& t, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
}

Parameter weight(std::string name, std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t = Tensor::zeros(rows, cols);
  glorot_fill(t, rng);
  return Parameter(std::move(name), std::move(t));
}

Parameter embedding(std::string name, std::size_t rows, std::size_t dim, Rng& rng) {
  Tensor t = Tensor::zeros(rows, dim);
  const double limit = std::sqrt(6.0 / static_cast<double>(dim + 1));
  for (double& v : t.values()) v = rng.uniform(-limit, limit);
  return Parameter(std::move(name), std::move(t));
}

LstmParams make_lstm(const std::string& prefix, std::size_t in, std::size_t d, Rng& rng) {
  LstmParams p;
  p.w_input = weight(prefix + ".w_input", in, 4 * d, rng);
  p.w_hidden = weight(prefix + ".w_hidden", d, 4 * d, rng);
  Tensor bias = Tensor::zeros(1, 4 * d);
  for (std::size_t j = d; j < 2 * d; ++j) bias[j] = 1.0;  // forget gate
  p.bias = Parameter(prefix + ".bias", std::move(bias));
  return p;
}

bool uses_charge(const DgnConfig& c) {
  return c.target == data::Target::kCharge && !(c.encoder == EncoderKind::kDgn && c.charge_blind);
}

bool has_charge_table(const DgnConfig& c) { return c.target == data::Target::kCharge; }

std::size_t head_input_dim(const DgnConfig& c) {
  std::size_t dim = c.encoder == EncoderKind::kRnn ? 2 * c.hidden_dim : c.pooled_dim();
  if (c.encoder != EncoderKind::kDgn && c.target == data::Target::kCharge) dim += c.charge_dim;
  return dim;
}

LstmVars lstm_vars(const LstmParams& p, auto& leaf) {
  return {leaf(p.w_input), leaf(p.w_hidden), leaf(p.bias)};
}

}  // namespace

std::vector<char> time_major_mask(const data::Batch& batch) {
  std::vector<char> out(batch.size * batch.steps);
  for (std::size_t b = 0; b < batch.size; ++b)
    for (std::size_t t = 0; t < batch.steps; ++t)
      out[t * batch.size + b] = batch.mask[b * batch.steps + t];
  return out;
}

Var embed_lookup(Graph& g, Var table, std::span<const std::size_t> tokens) {
  return g.gather_rows(table, tokens);
}

Var lstm_cell(Graph& g, Var pre, Var state, std::span<const char> active) {
  const Tensor& pv = pre.value();
  const std::size_t batch = pv.rows();
  if (pv.cols() % 4 != 0 || pv.cols() == 0)
    throw DimensionError("lstm_cell: pre-activation width " + std::to_string(pv.cols()) +
                         " is not a multiple of 4");
  const std::size_t d = pv.cols() / 4;
  const bool has_state = state.graph != nullptr;
  if (has_state && (state.rows() != batch || state.cols() != 2 * d))
    throw DimensionError("lstm_cell: state " + shape_string(state.value().shape()) +
                         " does not match " + std::to_string(batch) + " x " + std::to_string(2 * d));
  if (!active.empty() && active.size() != batch)
    throw DimensionError("lstm_cell: active mask size mismatch");

  struct Cache {
    std::vector<double> i, f, cand, o, tanh_c;
  };
  auto cache = std::make_shared<Cache>();
  for (auto* v : {&cache->i, &cache->f, &cache->cand, &cache->o, &cache->tanh_c})
    v->assign(batch * d, 0.0);

  Tensor out = Tensor::zeros(batch, 2 * d);
  const double* prev = has_state ? state.value().data() : nullptr;
  for (std::size_t r = 0; r < batch; ++r) {
    double* h = out.data() + r * 2 * d;
    double* c = h + d;
    if (!active.empty() && !active[r]) {
      if (prev) std::copy_n(prev + r * 2 * d, 2 * d, h);
      continue;
    }
    const double* a = pv.data() + r * 4 * d;
    for (std::size_t k = 0; k < d; ++k) {
      const std::size_t j = r * d + k;
      const double in = 1.0 / (1.0 + std::exp(-a[k]));
      const double forget = 1.0 / (1.0 + std::exp(-a[d + k]));
      const double cand = std::tanh(a[2 * d + k]);
      const double out_gate = 1.0 / (1.0 + std::exp(-a[3 * d + k]));
      const double c_prev = prev ? prev[r * 2 * d + d + k] : 0.0;
      c[k] = forget * c_prev + in * cand;
      const double tc = std::tanh(c[k]);
      h[k] = out_gate * tc;
      cache->i[j] = in;
      cache->f[j] = forget;
      cache->cand[j] = cand;
      cache->o[j] = out_gate;
      cache->tanh_c[j] = tc;
    }
  }

  std::vector<std::size_t> inputs = {pre.id};
  if (has_state) inputs.push_back(state.id);
  std::vector<char> keep(active.begin(), active.end());
  return g.custom(
      "lstm_cell", std::move(inputs), std::move(out),
      [cache, keep = std::move(keep), batch, d, has_state](Graph& g, std::size_t self) {
        const double* dy = g.grad_buffer(self);
        const auto& ids = g.inputs(self);
        double* dpre = g.grad_buffer(ids[0]);
        double* dprev = has_state ? g.grad_buffer(ids[1]) : nullptr;
        const double* prev = has_state ? g.value(ids[1]).data() : nullptr;
        for (std::size_t r = 0; r < batch; ++r) {
          const double* dh = dy + r * 2 * d;
          const double* dc = dh + d;
          if (!keep.empty() && !keep[r]) {
            if (dprev)
              for (std::size_t k = 0; k < 2 * d; ++k) dprev[r * 2 * d + k] += dh[k];
            continue;
          }
          for (std::size_t k = 0; k < d; ++k) {
            const std::size_t j = r * d + k;
            const double in = cache->i[j], forget = cache->f[j], cand = cache->cand[j],
                         out_gate = cache->o[j], tc = cache->tanh_c[j];
            const double dcell = dc[k] + dh[k] * out_gate * (1.0 - tc * tc);
            const double c_prev = prev ? prev[r * 2 * d + d + k] : 0.0;
            if (dpre) {
              double* da = dpre + r * 4 * d;
              da[k] += dcell * cand * in * (1.0 - in);
              da[d + k] += dcell * c_prev * forget * (1.0 - forget);
              da[2 * d + k] += dcell * in * (1.0 - cand * cand);
              da[3 * d + k] += dh[k] * tc * out_gate * (1.0 - out_gate);
            }
            if (dprev) dprev[r * 2 * d + d + k] += dcell * forget;
          }
        }
      });
}

Var lstm_direction(Graph& g, Var x, std::size_t batch, std::size_t steps,
                   std::span<const char> step_mask, const LstmVars& p, bool reverse) {
  const std::size_t d = p.w_hidden.rows();
  if (x.rows() != batch * steps)
    throw DimensionError("lstm input has " + std::to_string(x.rows()) + " rows for " +
                         std::to_string(steps) + " steps of " + std::to_string(batch));
  if (step_mask.size() != batch * steps) throw DimensionError("lstm step mask size mismatch");

  const Var projected = g.add(g.matmul(x, p.w_input), g.repeat_rows(p.bias, batch * steps));
  std::vector<Var> states(steps);
  Var state{};
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    Var pre = g.slice_rows(projected, t * batch, batch);
    if (state.graph != nullptr) pre = g.add(pre, g.matmul(g.slice_cols(state, 0, d), p.w_hidden));
    std::span<const char> active = step_mask.subspan(t * batch, batch);
    if (std::all_of(active.begin(), active.end(), [](char m) { return m != 0; })) active = {};
    state = lstm_cell(g, pre, state, active);
    states[t] = state;
  }
  return g.slice_cols(g.concat_rows(states), 0, d);
}

Var bilstm_layer(Graph& g, Var x, std::size_t batch, std::size_t steps,
                 std::span<const char> step_mask, const LstmVars& fwd, const LstmVars& bwd) {
  const Var parts[] = {lstm_direction(g, x, batch, steps, step_mask, fwd, false),
                       lstm_direction(g, x, batch, steps, step_mask, bwd, true)};
  return g.concat_cols(parts);
}

Var gate_layer(Graph& g, Var h_tilde, Var charge_rows, Var w, Var b) {
  const Var joined[] = {h_tilde, charge_rows};
  const Var logits = g.add(g.matmul(g.concat_cols(joined), w), g.repeat_rows(b, h_tilde.rows()));
  return g.mul(g.sigmoid(logits), h_tilde);
}

std::vector<char> window_mask(std::span<const std::size_t> lengths, std::size_t steps,
                              std::size_t width) {
  if (steps < width)
    throw DimensionError("padding policy violated: " + std::to_string(steps) +
                         " steps for filter width " + std::to_string(width));
  const std::size_t windows = steps - width + 1;
  std::vector<char> valid(lengths.size() * windows, 0);
  for (std::size_t b = 0; b < lengths.size(); ++b)
    for (std::size_t t = 0; t < windows; ++t)
      valid[b * windows + t] = t + width <= lengths[b] || (lengths[b] < width && t == 0);
  return valid;
}

Var conv_encode(Graph& g, Var h, std::size_t batch, std::size_t steps,
                std::span<const std::size_t> lengths, std::span<const ConvVars> convs) {
  if (lengths.size() != batch) throw DimensionError("conv_encode: one length per sequence needed");
  std::vector<Var> pooled;
  for (const ConvVars& conv : convs) {
    const std::vector<char> valid = window_mask(lengths, steps, conv.width);
    const Var windows = g.window_rows(h, batch, steps, conv.width);
    const Var response =
        g.add(g.matmul(windows, conv.filters), g.repeat_rows(conv.bias, windows.rows()));
    pooled.push_back(g.segment_max(response, batch, valid));
  }
  return g.concat_cols(pooled);
}

Model::Model(DgnConfig config) : config_(std::move(config)) {
  config_.validate();
  const DgnConfig& c = config_;
  Rng rng(c.seed);
  const std::size_t d = c.hidden_dim;

  word_embeddings = embedding("word_embeddings", c.vocab_size, c.embed_dim, rng);
  if (has_charge_table(c))
    charge_embeddings = embedding("charge_embeddings", c.charge_count, c.charge_dim, rng);

  std::size_t channels = c.embed_dim;
  const std::size_t layers =
      c.encoder == EncoderKind::kDgn ? c.depth : (c.encoder == EncoderKind::kCnn ? 0 : 1);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::string prefix = "block" + std::to_string(l);
    BlockParams block;
    block.forward = make_lstm(prefix + ".forward", channels, d, rng);
    block.backward = make_lstm(prefix + ".backward", channels, d, rng);
    if (c.encoder == EncoderKind::kDgn) {
      block.gate_w = weight(prefix + ".gate_w", 2 * d + c.charge_dim, 2 * d, rng);
      block.gate_b = Parameter(prefix + ".gate_b", Tensor::zeros(1, 2 * d));
    }
    blocks.push_back(std::move(block));
    channels = 2 * d;
  }
  if (c.encoder != EncoderKind::kRnn) {
    for (std::size_t w : c.filter_widths) {
      ConvParams conv;
      conv.width = w;
      const std::string prefix = "conv" + std::to_string(w);
      conv.filters = weight(prefix + ".filters", w * channels, c.filters, rng);
      conv.bias = Parameter(prefix + ".bias", Tensor::zeros(1, c.filters));
      convs.push_back(std::move(conv));
    }
  }
  head_w = weight("head_w", head_input_dim(c), 1, rng);
  head_b = Parameter("head_b", Tensor::zeros(1, 1));
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out = {&word_embeddings};
  if (has_charge_table(config_)) out.push_back(&charge_embeddings);
  for (BlockParams& b : blocks) {
    for (LstmParams* l : {&b.forward, &b.backward}) {
      out.push_back(&l->w_input);
      out.push_back(&l->w_hidden);
      out.push_back(&l->bias);
    }
    if (config_.encoder == EncoderKind::kDgn) {
      out.push_back(&b.gate_w);
      out.push_back(&b.gate_b);
    }
  }
  for (ConvParams& conv : convs) {
    out.push_back(&conv.filters);
    out.push_back(&conv.bias);
  }
  out.push_back(&head_w);
  out.push_back(&head_b);
  return out;
}

std::vector<const Parameter*> Model::parameters() const {
  auto mutable_params = const_cast<Model*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

void Model::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

void Model::set_output_bias(double months) { head_b.value[0] = months; }

template <typename Leaf>
Var Model::build(Graph& g, const data::Batch& batch, Leaf leaf, Var* positions) const {
  const DgnConfig& c = config_;
  const std::size_t B = batch.size, T = batch.steps;
  if (B == 0 || batch.tokens.size() != B * T || batch.mask.size() != B * T)
    throw DimensionError("malformed batch");
  if (c.encoder != EncoderKind::kRnn && T < c.max_width())
    throw DimensionError("padding policy violated: batch has " + std::to_string(T) +
                         " steps but the widest filter is " + std::to_string(c.max_width()));
  for (std::size_t len : batch.lengths)
    if (len == 0) throw EmptySequenceError("batch holds an empty sequence");

  const std::vector<char> step_mask = time_major_mask(batch);
  std::vector<std::size_t> tokens(B * T);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < T; ++t) tokens[t * B + b] = batch.tokens[b * T + t];

  const Var x = embed_lookup(g, leaf(word_embeddings), tokens);
  Var charge_vec{};
  if (uses_charge(c)) {
    for (std::size_t id : batch.charges)
      if (id >= c.charge_count)
        throw VocabularyError("charge index " + std::to_string(id) + " outside inventory of " +
                              std::to_string(c.charge_count));
    charge_vec = g.gather_rows(leaf(charge_embeddings), batch.charges);
  }

  auto conv_vars = [&] {
    std::vector<ConvVars> out;
    for (const ConvParams& conv : convs)
      out.push_back({conv.width, leaf(conv.filters), leaf(conv.bias)});
    return out;
  };

  Var z{};
  switch (c.encoder) {
    case EncoderKind::kDgn: {
      Var h = x;
      const Var charge_rows = c.charge_blind ? g.constant(Tensor::zeros(B * T, c.charge_dim))
                                             : g.repeat_rows(charge_vec, T);
      for (const BlockParams& block : blocks) {
        const Var h_tilde = bilstm_layer(g, h, B, T, step_mask, lstm_vars(block.forward, leaf),
                                         lstm_vars(block.backward, leaf));
        h = gate_layer(g, h_tilde, charge_rows, leaf(block.gate_w), leaf(block.gate_b));
      }
      if (positions) *positions = h;
      z = conv_encode(g, g.mask_rows(h, step_mask), B, T, batch.lengths, conv_vars());
      break;
    }
    case EncoderKind::kCnn:
      if (positions) *positions = x;
      z = conv_encode(g, g.mask_rows(x, step_mask), B, T, batch.lengths, conv_vars());
      break;
    case EncoderKind::kRnn: {
      const BlockParams& block = blocks.front();
      const Var states = bilstm_layer(g, x, B, T, step_mask, lstm_vars(block.forward, leaf),
                                      lstm_vars(block.backward, leaf));
      if (positions) *positions = states;
      const std::size_t d = c.hidden_dim;
      const Var finals[] = {g.slice_cols(g.slice_rows(states, (T - 1) * B, B), 0, d),
                            g.slice_cols(g.slice_rows(states, 0, B), d, d)};
      z = g.concat_cols(finals);
      break;
    }
    case EncoderKind::kRcnn: {
      const BlockParams& block = blocks.front();
      const Var states = bilstm_layer(g, x, B, T, step_mask, lstm_vars(block.forward, leaf),
                                      lstm_vars(block.backward, leaf));
      if (positions) *positions = states;
      z = conv_encode(g, g.mask_rows(states, step_mask), B, T, batch.lengths, conv_vars());
      break;
    }
  }
  if (c.encoder != EncoderKind::kDgn && uses_charge(c)) {
    const Var parts[] = {z, charge_vec};
    z = g.concat_cols(parts);
  }
  return g.relu(g.add(g.matmul(z, leaf(head_w)), g.repeat_rows(leaf(head_b), B)));
}

Var Model::forward(Graph& g, const data::Batch& batch) {
  auto leaf = [&g](const Parameter& p) { return g.param(const_cast<Parameter&>(p)); };
  return build(g, batch, leaf, nullptr);
}

std::vector<double> Model::predict(const data::Batch& batch) const {
  Graph g;
  auto leaf = [&g](const Parameter& p) { return g.frozen(p); };
  const Var out = build(g, batch, leaf, nullptr);
  return {out.value().values().begin(), out.value().values().end()};
}

Tensor Model::encode_positions(const data::Batch& batch) const {
  Graph g;
  auto leaf = [&g](const Parameter& p) { return g.frozen(p); };
  Var positions{};
  build(g, batch, leaf, &positions);
  return positions.value();
}

double Model::predict_one(std::span<const std::size_t> tokens, std::size_t charge) const {
  if (tokens.empty()) throw EmptySequenceError("cannot predict for an empty token sequence");
  data::Batch b;
  b.size = 1;
  b.steps = std::max(tokens.size(), config_.max_width());
  b.tokens.assign(b.steps, data::kPadIndex);
  std::copy(tokens.begin(), tokens.end(), b.tokens.begin());
  b.mask.assign(b.steps, 0);
  std::fill_n(b.mask.begin(), tokens.size(), 1);
  b.lengths = {tokens.size()};
  b.charges = {charge};
  b.gold = {0.0};
  b.records = {0};
  b.charge_slots = {0};
  b.case_ids = {""};
  for (std::size_t id : tokens)
    if (id >= config_.vocab_size)
      throw VocabularyError("token index " + std::to_string(id) + " outside vocabulary of " +
                            std::to_string(config_.vocab_size));
  return predict(b).front();
}

}  // namespace dgn::model
