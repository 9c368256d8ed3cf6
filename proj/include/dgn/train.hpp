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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dgn/data/batch.hpp"
#include "dgn/data/record.hpp"
#include "dgn/data/vocab.hpp"
#include "dgn/metrics.hpp"
#include "dgn/model.hpp"
#include "dgn/objective.hpp"

namespace dgn::train {

enum class OptimizerKind { kAdam, kSgd };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  double clip_norm = 5.0;  // global gradient norm; 0 disables clipping
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  objective::LossKind loss = objective::LossKind::kLogHuber;
  objective::LossConfig loss_config;
  // Divide each batch loss by its instance count; off gives the plain sum.
  bool normalize_by_instances = true;
  // Start the output bias at the geometric mean of the training terms.
  bool init_output_bias = true;
  bool keep_cases_together = false;

  void validate() const;
};

double global_grad_norm(std::span<Parameter* const> params);

// Adaptive-moment or plain gradient descent over a fixed parameter list.
class Optimizer {
 public:
  Optimizer(const TrainConfig& config, std::vector<Parameter*> params);

  // Clips the global gradient norm, then updates every parameter. Returns the
  // norm before clipping.
  double step();
  std::size_t steps() const { return steps_; }

 private:
  TrainConfig config_;
  std::vector<Parameter*> params_;
  std::vector<std::vector<double>> first_, second_;
  std::size_t steps_ = 0;
};

struct EpochStats {
  double mean_loss = 0.0;  // per instance
  std::size_t instances = 0;
  std::size_t batches = 0;
};

// One pass over `batches` in order, one optimizer step per batch. A
// non-finite loss or activation aborts with a NumericError naming the batch
// and the parameter norms.
EpochStats train_epoch(model::Model& model, std::span<const data::Batch> batches,
                       Optimizer& optimizer, const TrainConfig& config);

// Mean per-instance loss without updating anything.
double mean_loss(const model::Model& model, std::span<const data::Batch> batches,
                 const TrainConfig& config);

// One row of model output. Total-level rows carry the charge label "total".
struct CasePrediction {
  std::string case_id;
  std::string charge;
  double gold = 0.0;
  double predicted = 0.0;

  friend bool operator==(const CasePrediction&, const CasePrediction&) = default;
};

inline constexpr std::string_view kTotalLabel = "total";

// Per-(case, charge) predictions for charge-level models, per-case totals for
// total-level models; rows follow record order, then charge order.
std::vector<CasePrediction> predict_records(const model::Model& model,
                                            std::span<const data::CaseRecord> records,
                                            const data::Vocabulary& vocab,
                                            std::size_t batch_size = 64);

// Folds per-charge rows into one total row per case (first-appearance order)
// with the capped total-term rule applied to both gold and predicted terms.
// Rows already labelled total pass through unchanged.
std::vector<CasePrediction> compose_totals(std::span<const CasePrediction> rows,
                                           const objective::TermCap& cap = {});

// Acc@p tolerances reported by default: 0.1 and 0.2.
std::span<const double> default_tolerances();

metrics::EvalReport evaluate_rows(std::span<const CasePrediction> rows, metrics::Level level,
                                  std::span<const double> ps,
                                  const metrics::ScoreTable& table = metrics::ScoreTable::standard());

// Charge- or total-level report for a model on a record set. Charge-level
// models are scored at total level through compose_totals.
metrics::EvalReport evaluate_model(const model::Model& model,
                                   std::span<const data::CaseRecord> records,
                                   const data::Vocabulary& vocab, metrics::Level level,
                                   std::span<const double> ps = default_tolerances(),
                                   const metrics::ScoreTable& table = metrics::ScoreTable::standard());


// Tracks the best score seen and how many epochs passed without beating it.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience);
  // Returns true when `score` strictly improves on the best so far.
  bool update(double score);
  bool should_stop() const { return stale_ >= patience_; }
  double best() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t stale_ = 0;
  double best_;
  bool seen_ = false;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  metrics::EvalReport valid;
  double seconds = 0.0;  // cumulative wall time
  bool selected = false;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;

  const EpochRecord& selected() const;
  // epoch,loss,S,EM,acc01,acc02,seconds,selected
  std::string to_csv() const;
};

using EpochCallback = std::function<void(const EpochRecord&)>;
// Returning true ends training after the epoch it was called for.
using StopRule = std::function<bool(const EpochRecord&)>;

// Trains on `train`, scores the validation set after every epoch at the
// model's own level and leaves the best-scoring parameters in `model`.
TrainLog fit(model::Model& model, std::span<const data::CaseRecord> train,
             std::span<const data::CaseRecord> valid, const data::Vocabulary& vocab,
             const TrainConfig& config, const EpochCallback& on_epoch = {},
             const StopRule& stop = {});

// Geometric mean of gold terms minus one; the output bias that minimizes the
// log-space squared error of a constant predictor.
double log_mean_term(std::span<const data::CaseRecord> records, data::Target target);

}  // namespace dgn::train
