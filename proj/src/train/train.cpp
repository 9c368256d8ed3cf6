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

#include "dgn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "dgn/error.hpp"
#include "dgn/random.hpp"

namespace dgn::train {

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam or sgd)");
}

void TrainConfig::validate() const {
  // A zero learning rate is accepted: it turns training into a dry run.
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning rate must be finite and non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("moment decay rates must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("optimizer epsilon must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (max_epochs < 1) throw ConfigError("at least one epoch is required");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (!(clip_norm >= 0.0)) throw ConfigError("clip norm must be non-negative");
  loss_config.validate();
}

double global_grad_norm(std::span<Parameter* const> params) {
  double sq = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad.values()) sq += g * g;
  return std::sqrt(sq);
}

Optimizer::Optimizer(const TrainConfig& config, std::vector<Parameter*> params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  if (config_.optimizer == OptimizerKind::kAdam)
    for (const Parameter* p : params_) {
      first_.emplace_back(p->value.size(), 0.0);
      second_.emplace_back(p->value.size(), 0.0);
    }
}

double Optimizer::step() {
  const double norm = global_grad_norm(params_);
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  const double scale =
      config_.clip_norm > 0.0 && norm > config_.clip_norm ? config_.clip_norm / norm : 1.0;
  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.optimizer == OptimizerKind::kSgd) {
    for (Parameter* p : params_) {
      auto value = p->value.values();
      const auto grad = p->grad.values();
      for (std::size_t i = 0; i < value.size(); ++i) value[i] -= lr * (scale * grad[i]);
    }
    return norm;
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto value = params_[k]->value.values();
    const auto grad = params_[k]->grad.values();
    std::vector<double>& m = first_[k];
    std::vector<double>& v = second_[k];
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = scale * grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      value[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
    }
  }
  return norm;
}

namespace {

Var batch_loss(Graph& g, model::Model& model, const data::Batch& batch,
               const TrainConfig& config) {
  return objective::loss_node(g, model.forward(g, batch), batch.gold, config.loss,
                              config.loss_config);
}

std::string parameter_norms(const model::Model& model) {
  std::ostringstream out;
  bool first = true;
  for (const Parameter* p : model.parameters()) {
    double sq = 0.0;
    for (double v : p->value.values()) sq += v * v;
    out << (first ? "" : ", ") << p->name << "=" << std::sqrt(sq);
    first = false;
  }
  return out.str();
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

EpochStats train_epoch(model::Model& model, std::span<const data::Batch> batches,
                       Optimizer& optimizer, const TrainConfig& config) {
  EpochStats stats;
  double total = 0.0;
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const data::Batch& batch = batches[b];
    model.zero_grad();
    try {
      Graph g;
      const Var sum = batch_loss(g, model, batch, config);
      const double value = sum.value()[0];
      if (!std::isfinite(value)) throw NumericError("non-finite loss");
      total += value;
      g.backward(config.normalize_by_instances
                     ? g.scale(sum, 1.0 / static_cast<double>(batch.size))
                     : sum);
      optimizer.step();
    } catch (const NumericError& e) {
      const std::string first = batch.case_ids.empty() ? "?" : batch.case_ids.front();
      throw NumericError("training diverged at batch " + std::to_string(b) + " (first case " +
                         first + "): " + e.what() + "; parameter norms: " +
                         parameter_norms(model));
    }
    stats.instances += batch.size;
    ++stats.batches;
  }
  stats.mean_loss = stats.instances ? total / static_cast<double>(stats.instances) : 0.0;
  return stats;
}

double mean_loss(const model::Model& model, std::span<const data::Batch> batches,
                 const TrainConfig& config) {
  double total = 0.0;
  std::size_t n = 0;
  for (const data::Batch& batch : batches) {
    const std::vector<double> pred = model.predict(batch);
    for (std::size_t i = 0; i < pred.size(); ++i)
      total += objective::instance_loss(config.loss, batch.gold[i], pred[i], config.loss_config);
    n += batch.size;
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

std::vector<CasePrediction> predict_records(const model::Model& model,
                                            std::span<const data::CaseRecord> records,
                                            const data::Vocabulary& vocab,
                                            std::size_t batch_size) {
  const data::Target target = model.config().target;
  data::BatchOptions options;
  options.batch_size = batch_size;
  options.min_length = model.config().max_width();
  const std::vector<data::Batch> batches = data::make_batches(records, vocab, options, target);

  // (record, slot) -> row, so the output order does not depend on batching.
  std::map<std::pair<std::size_t, std::size_t>, CasePrediction> rows;
  for (const data::Batch& batch : batches) {
    const std::vector<double> pred = model.predict(batch);
    for (std::size_t i = 0; i < batch.size; ++i) {
      const data::CaseRecord& rec = records[batch.records[i]];
      CasePrediction row;
      row.case_id = rec.id;
      row.charge = target == data::Target::kTotal ? std::string(kTotalLabel)
                                                  : rec.charges[batch.charge_slots[i]];
      row.gold = batch.gold[i];
      row.predicted = pred[i];
      rows.emplace(std::pair{batch.records[i], batch.charge_slots[i]}, std::move(row));
    }
  }
  std::vector<CasePrediction> out;
  out.reserve(rows.size());
  for (auto& [key, row] : rows) out.push_back(std::move(row));
  return out;
}

std::vector<CasePrediction> compose_totals(std::span<const CasePrediction> rows,
                                           const objective::TermCap& cap) {
  std::vector<CasePrediction> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> golds, preds;
  for (const CasePrediction& row : rows) {
    if (row.charge == kTotalLabel) {
      out.push_back(row);
      golds.emplace_back();
      preds.emplace_back();
      continue;
    }
    auto [it, inserted] = index.emplace(row.case_id, out.size());
    if (inserted) {
      out.push_back({row.case_id, std::string(kTotalLabel), 0.0, 0.0});
      golds.emplace_back();
      preds.emplace_back();
    }
    golds[it->second].push_back(row.gold);
    preds[it->second].push_back(row.predicted);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (golds[i].empty()) continue;
    out[i].gold = objective::total_term(golds[i], cap);
    out[i].predicted = objective::total_term(preds[i], cap);
  }
  return out;
}

std::span<const double> default_tolerances() {
  static const double ps[] = {0.1, 0.2};
  return ps;
}

metrics::EvalReport evaluate_rows(std::span<const CasePrediction> rows, metrics::Level level,
                                  std::span<const double> ps, const metrics::ScoreTable& table) {
  std::vector<metrics::Prediction> preds;
  if (level == metrics::Level::kTotal) {
    for (const CasePrediction& row : compose_totals(rows)) preds.push_back({row.gold, row.predicted});
  } else {
    for (const CasePrediction& row : rows) {
      if (row.charge == kTotalLabel)
        throw ContractError("charge-level evaluation needs per-charge predictions");
      preds.push_back({row.gold, row.predicted});
    }
  }
  if (preds.empty()) throw ContractError("nothing to evaluate");
  return metrics::evaluate(preds, table, ps, level);
}

metrics::EvalReport evaluate_model(const model::Model& model,
                                   std::span<const data::CaseRecord> records,
                                   const data::Vocabulary& vocab, metrics::Level level,
                                   std::span<const double> ps, const metrics::ScoreTable& table) {
  return evaluate_rows(predict_records(model, records, vocab), level, ps, table);
}

EarlyStopper::EarlyStopper(std::size_t patience) : patience_(patience), best_(0.0) {
  if (patience < 1) throw ConfigError("patience must be at least 1");
}

bool EarlyStopper::update(double score) {
  if (!seen_ || score > best_) {
    seen_ = true;
    best_ = score;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

const EpochRecord& TrainLog::selected() const {
  for (const EpochRecord& e : epochs)
    if (e.selected) return e;
  throw ContractError("training log has no selected epoch");
}

std::string TrainLog::to_csv() const {
  std::string out = "epoch,loss,S,EM,acc01,acc02,seconds,selected\n";
  char line[256];
  for (const EpochRecord& e : epochs) {
    auto acc = [&](double p) {
      for (const auto& [q, v] : e.valid.acc)
        if (q == p) return v;
      return std::nan("");
    };
    std::snprintf(line, sizeof line, "%zu,%.6f,%.4f,%.4f,%.4f,%.4f,%.3f,%d\n", e.epoch, e.loss,
                  e.valid.s, e.valid.em, acc(0.1), acc(0.2), e.seconds, e.selected ? 1 : 0);
    out += line;
  }
  return out;
}

double log_mean_term(std::span<const data::CaseRecord> records, data::Target target) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const data::CaseRecord& rec : records) {
    if (target == data::Target::kTotal) {
      std::vector<double> terms(rec.terms.begin(), rec.terms.end());
      sum += std::log1p(objective::total_term(terms));
      ++n;
    } else {
      for (int t : rec.terms) sum += std::log1p(static_cast<double>(t));
      n += rec.terms.size();
    }
  }
  if (n == 0) throw ContractError("no training terms");
  return std::expm1(sum / static_cast<double>(n));
}

TrainLog fit(model::Model& model, std::span<const data::CaseRecord> train,
             std::span<const data::CaseRecord> valid, const data::Vocabulary& vocab,
             const TrainConfig& config, const EpochCallback& on_epoch, const StopRule& stop) {
  config.validate();
  if (train.empty() || valid.empty()) throw ContractError("fit needs nonempty train and valid sets");
  const data::Target target = model.config().target;
  const metrics::Level level =
      target == data::Target::kTotal ? metrics::Level::kTotal : metrics::Level::kCharge;
  if (config.init_output_bias) model.set_output_bias(log_mean_term(train, target));

  Optimizer optimizer(config, model.parameters());
  EarlyStopper stopper(config.patience);
  std::vector<Tensor> best;
  TrainLog log;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    data::BatchOptions options;
    options.batch_size = config.batch_size;
    options.min_length = model.config().max_width();
    options.shuffle_seed = derive_seed(config.seed, epoch);
    options.keep_cases_together = config.keep_cases_together;
    const std::vector<data::Batch> batches = data::make_batches(train, vocab, options, target);

    EpochRecord record;
    record.epoch = epoch;
    record.loss = train_epoch(model, batches, optimizer, config).mean_loss;
    record.valid = evaluate_model(model, valid, vocab, level);
    record.seconds = elapsed(start);
    if (stopper.update(record.valid.s)) {
      for (EpochRecord& e : log.epochs) e.selected = false;
      record.selected = true;
      best.clear();
      for (const Parameter* p : model.parameters()) best.push_back(p->value);
    }
    log.epochs.push_back(record);
    if (on_epoch) on_epoch(log.epochs.back());
    if (stopper.should_stop() || (stop && stop(log.epochs.back()))) break;
  }
  auto params = model.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = best[k];
  return log;
}

}  // namespace dgn::train
