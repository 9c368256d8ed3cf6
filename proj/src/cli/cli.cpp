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

#include "dgn/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dgn/data/dataset.hpp"
#include "dgn/data/extract.hpp"
#include "dgn/data/synth.hpp"
#include "dgn/data/vocab.hpp"
#include "dgn/random.hpp"

namespace dgn::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string loss = "lhl";
  std::string level = "charge";
  std::string encoder = "dgn";
  std::string target = "charge";
  std::string optimizer = "adam";
  std::vector<std::string> losses = {"lhl", "hl", "mse", "mae"};
};

void add_model_flags(CLI::App* sub, CommandPlan& plan, Options& opts) {
  model::DgnConfig& m = plan.model_config;
  train::TrainConfig& t = plan.train_config;
  sub->add_option("--depth", m.depth, "number of stacked gated blocks")->capture_default_str();
  sub->add_option("--filters", m.filters, "convolution filters per width")->capture_default_str();
  sub->add_option("--embed-dim", m.embed_dim, "word embedding size")->capture_default_str();
  sub->add_option("--hidden-dim", m.hidden_dim, "LSTM state size per direction")
      ->capture_default_str();
  sub->add_option("--charge-dim", m.charge_dim, "charge embedding size")->capture_default_str();
  sub->add_option("--batch-size", t.batch_size, "instances per minibatch")->capture_default_str();
  sub->add_option("--lr", t.learning_rate, "learning rate")->capture_default_str();
  sub->add_option("--epochs", t.max_epochs, "maximum training epochs")->capture_default_str();
  sub->add_option("--patience", t.patience, "epochs without validation gain before stopping")
      ->capture_default_str();
  sub->add_option("--loss", opts.loss, "training loss")
      ->check(CLI::IsMember({"lhl", "hl", "mse", "mae"}))
      ->capture_default_str();
  sub->add_option("--encoder", opts.encoder, "encoder: dgn, or the cnn/rnn/rcnn baselines")
      ->check(CLI::IsMember({"dgn", "cnn", "rnn", "rcnn"}))
      ->capture_default_str();
  sub->add_option("--target", opts.target, "predict per-charge terms or the total term")
      ->check(CLI::IsMember({"charge", "total"}))
      ->capture_default_str();
  sub->add_flag("--charge-blind", m.charge_blind, "gates see a zero vector instead of the charge");
  sub->add_option("--optimizer", opts.optimizer, "adam or sgd")
      ->check(CLI::IsMember({"adam", "sgd"}))
      ->capture_default_str();
  sub->add_option("--min-count", plan.min_count, "drop tokens seen fewer times than this")
      ->capture_default_str();
}

void add_eval_flags(CLI::App* sub, CommandPlan& plan, Options& opts) {
  sub->add_option("--level", opts.level, "charge or total")
      ->check(CLI::IsMember({"charge", "total"}))
      ->capture_default_str();
  sub->add_option("--p", plan.ps, "Acc@p tolerance (repeatable)")->allow_extra_args(false);
  sub->add_option("--score-table", plan.score_table, "score bucket file")
      ->check(CLI::ExistingFile);
}

void add_seed(CLI::App* sub, CommandPlan& plan) {
  sub->add_option("--seed", plan.seed, "seed for every random choice")->capture_default_str();
}

std::string help_for(const CLI::App& app) {
  for (const CLI::App* sub : app.get_subcommands()) return sub->help();
  return app.help();
}

void resolve(CommandPlan& plan, const Options& opts) {
  plan.train_config.loss = objective::parse_loss(opts.loss);
  plan.train_config.optimizer = train::parse_optimizer(opts.optimizer);
  plan.train_config.seed = derive_seed(plan.seed, kShuffleSeed);
  plan.model_config.seed = derive_seed(plan.seed, kInitSeed);
  plan.model_config.encoder = model::parse_encoder(opts.encoder);
  plan.model_config.target = opts.target == "total" ? data::Target::kTotal : data::Target::kCharge;
  plan.level = metrics::parse_level(opts.level);
  plan.losses.clear();
  for (const std::string& name : opts.losses) plan.losses.push_back(objective::parse_loss(name));

  for (double p : plan.ps)
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("tolerances must be non-negative");
  if (plan.ps.empty()) throw ConfigError("at least one --p tolerance is required");
  if (plan.command == "gen-data" &&
      !(plan.min_charges >= 1 && plan.min_charges <= plan.max_charges && plan.max_charges <= 3))
    throw ConfigError("charges per case must satisfy 1 <= min <= max <= 3");
  if (plan.command == "gen-data" && plan.count < 1) throw ConfigError("--count must be positive");
  if (plan.command == "eval" && plan.model.empty() == plan.predictions.empty())
    throw ConfigError("eval needs either --model with --data, or --predictions");
  if (plan.command == "eval" && !plan.model.empty() && plan.data.empty())
    throw ConfigError("eval --model needs --data");
  if (plan.command == "sweep-depth" && plan.depths.empty())
    throw ConfigError("--depths needs at least one value");
  if (plan.command == "compare-loss" &&
      std::find(plan.losses.begin(), plan.losses.end(), objective::LossKind::kLogHuber) ==
          plan.losses.end())
    throw ConfigError("compare-loss normalizes by lhl, so --losses must include it");

  model::DgnConfig probe = plan.model_config;
  if (plan.command == "sweep-depth")
    for (std::size_t depth : plan.depths) {
      probe.depth = depth;
      probe.validate();
    }
  else
    probe.validate();
  plan.train_config.validate();
}

}  // namespace

CommandPlan parse_args(int argc, const char* const* argv) {
  CommandPlan plan;
  Options opts;
  CLI::App app{"Charge-conditioned prison term prediction", "dgn"};
  app.require_subcommand(1);

  CLI::App* gen = app.add_subcommand("gen-data", "write a seeded synthetic corpus");
  gen->add_option("--out", plan.out, "output directory")->required();
  gen->add_option("--count", plan.count, "number of cases")->capture_default_str();
  gen->add_option("--min-charges", plan.min_charges, "fewest charges per case")
      ->capture_default_str();
  gen->add_option("--max-charges", plan.max_charges, "most charges per case")
      ->capture_default_str();
  add_seed(gen, plan);

  CLI::App* extract = app.add_subcommand("extract", "build records from judgment documents");
  extract->add_option("--data", plan.data, "judgment JSONL")->required()->check(CLI::ExistingFile);
  extract->add_option("--patterns", plan.patterns, "sentence pattern file")
      ->check(CLI::ExistingFile);
  extract->add_option("--out", plan.out, "output JSONL")->required();

  CLI::App* train = app.add_subcommand("train", "fit a model");
  train->add_option("--data", plan.data, "training JSONL")->required()->check(CLI::ExistingFile);
  train->add_option("--valid", plan.valid, "validation JSONL (default: the training data)")
      ->check(CLI::ExistingFile);
  train->add_option("--out", plan.out, "checkpoint path")->required();
  add_model_flags(train, plan, opts);
  add_seed(train, plan);

  CLI::App* eval = app.add_subcommand("eval", "score a model or a prediction CSV");
  eval->add_option("--model", plan.model, "checkpoint")->check(CLI::ExistingFile);
  eval->add_option("--data", plan.data, "records JSONL")->check(CLI::ExistingFile);
  eval->add_option("--predictions", plan.predictions, "prediction CSV")->check(CLI::ExistingFile);
  eval->add_option("--out", plan.out, "report CSV");
  add_eval_flags(eval, plan, opts);

  CLI::App* predict = app.add_subcommand("predict", "write per-charge predictions");
  predict->add_option("--model", plan.model, "checkpoint")->required()->check(CLI::ExistingFile);
  predict->add_option("--data", plan.data, "records JSONL")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", plan.out, "prediction CSV")->required();

  CLI::App* total = app.add_subcommand("total", "combine per-charge predictions into totals");
  total->add_option("--data", plan.predictions, "prediction CSV")
      ->required()
      ->check(CLI::ExistingFile);
  total->add_option("--out", plan.out, "total prediction CSV")->required();

  CLI::App* sweep = app.add_subcommand("sweep-depth", "train and score one model per depth");
  CLI::App* compare = app.add_subcommand("compare-loss", "train and score one model per loss");
  for (CLI::App* sub : {sweep, compare}) {
    sub->add_option("--data", plan.data, "training JSONL")->required()->check(CLI::ExistingFile);
    sub->add_option("--valid", plan.valid, "validation JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--test", plan.test, "held-out JSONL scored instead of the validation set")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", plan.out, "result CSV")->required();
    add_model_flags(sub, plan, opts);
    add_eval_flags(sub, plan, opts);
    add_seed(sub, plan);
  }
  sweep->add_option("--depths", plan.depths, "depths to train")
      ->delimiter(',')
      ->capture_default_str();
  compare->add_option("--losses", opts.losses, "losses to train")
      ->delimiter(',')
      ->check(CLI::IsMember({"lhl", "hl", "mse", "mae"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    plan.help_text = help_for(app);
    return plan;
  } catch (const CLI::CallForAllHelp&) {
    plan.help_text = app.help("", CLI::AppFormatMode::All);
    return plan;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  plan.command = app.get_subcommands().front()->get_name();
  try {
    resolve(plan, opts);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return plan;
}

namespace {

// Outputs written so far; flagged as partial when the command fails.
class Artifacts {
 public:
  fs::path add(const fs::path& p) {
    paths_.push_back(p);
    return p;
  }
  void flag_partial() const {
    for (const fs::path& p : paths_) {
      std::error_code ec;
      if (fs::exists(p, ec)) fs::rename(p, fs::path(p.string() + ".partial"), ec);
    }
  }
  void drop_stale_partials() const {
    for (const fs::path& p : paths_) {
      std::error_code ec;
      fs::remove(fs::path(p.string() + ".partial"), ec);
    }
  }

 private:
  std::vector<fs::path> paths_;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

std::vector<data::CaseRecord> load_records(const fs::path& path, std::ostream& err) {
  data::LoadReport report = data::load_jsonl(path);
  if (!report.rejects.empty()) {
    err << path.string() << ": skipped " << report.rejects.size() << " record(s):";
    for (const auto& [reason, n] : report.reject_counts()) err << " " << reason << "=" << n;
    err << "\n";
  }
  if (report.records.empty()) throw FormatError(path.string() + " holds no usable records");
  return std::move(report.records);
}

fs::path vocab_path(const fs::path& model) { return model.string() + ".vocab"; }
fs::path charges_path(const fs::path& model) { return model.string() + ".charges"; }

metrics::ScoreTable score_table(const CommandPlan& plan) {
  return plan.score_table.empty() ? metrics::ScoreTable::standard()
                                  : metrics::ScoreTable::load(plan.score_table);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void gen_data(const CommandPlan& plan, Artifacts& artifacts, std::ostream& out) {
  data::SynthSpec spec = data::SynthSpec::standard(derive_seed(plan.seed, kSynthSeed));
  for (std::size_t k = 1; k <= spec.charges_per_case.size(); ++k)
    if (k < plan.min_charges || k > plan.max_charges) spec.charges_per_case[k - 1] = 0.0;
  const std::vector<data::SynthCase> cases = data::gen_synthetic(spec, plan.count);

  std::vector<data::CaseRecord> records;
  std::vector<data::JudgmentDoc> docs;
  for (const data::SynthCase& c : cases) {
    records.push_back(c.record);
    docs.push_back({c.record.id, c.record.fact, c.judgment});
  }
  const data::DatasetSplit split =
      data::split_dataset(records, {}, derive_seed(plan.seed, kSplitSeed));
  fs::create_directories(plan.out);
  data::write_jsonl(artifacts.add(plan.out / "train.jsonl"), split.train);
  data::write_jsonl(artifacts.add(plan.out / "valid.jsonl"), split.valid);
  data::write_jsonl(artifacts.add(plan.out / "test.jsonl"), split.test);
  data::write_judgments(artifacts.add(plan.out / "judgments.jsonl"), docs);
  out << "wrote " << split.train.size() << " train, " << split.valid.size() << " valid, "
      << split.test.size() << " test cases to " << plan.out.string() << "\n";
}

void extract(const CommandPlan& plan, Artifacts& artifacts, std::ostream& out) {
  const data::ExtractionPatterns patterns = plan.patterns.empty()
                                                ? data::ExtractionPatterns::standard()
                                                : data::ExtractionPatterns::load(plan.patterns);
  const std::vector<data::JudgmentDoc> docs = data::load_judgments(plan.data);
  std::vector<data::CaseRecord> records;
  std::ofstream rejects = open_out(artifacts.add(plan.out.string() + ".rejects.csv"));
  rejects << "line,id,reason,detail\n";
  std::size_t rejected = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const data::JudgmentDoc& doc = docs[i];
    const data::ExtractResult result = data::extract_record(doc.judgment, patterns);
    data::CaseRecord rec;
    rec.id = doc.id;
    rec.fact = doc.fact;
    rec.tokens = data::tokenize(doc.fact);
    for (const data::SentenceFragment& f : result.fragments) {
      rec.charges.push_back(f.charge);
      rec.terms.push_back(f.months);
    }
    std::optional<data::RejectReason> reason = result.rejected;
    if (!reason) reason = data::check_record(rec);
    if (reason) {
      ++rejected;
      rejects << (i + 1) << "," << doc.id << "," << data::reject_reason_name(*reason) << ","
              << result.detail << "\n";
      continue;
    }
    records.push_back(std::move(rec));
  }
  data::write_jsonl(artifacts.add(plan.out), records);
  out << "extracted " << records.size() << " record(s), rejected " << rejected << "\n";
}

struct TrainingData {
  std::vector<data::CaseRecord> train, valid;
  data::Vocabulary vocab;
};

TrainingData load_training(const CommandPlan& plan, std::ostream& err) {
  TrainingData d;
  d.train = load_records(plan.data, err);
  d.valid = plan.valid.empty() ? d.train : load_records(plan.valid, err);
  d.vocab = data::Vocabulary::build(d.train, plan.min_count);
  // Charges first seen in validation still need an embedding row.
  for (const data::CaseRecord& rec : d.valid)
    for (const std::string& charge : rec.charges) d.vocab.add_charge(charge);
  return d;
}

model::Model fit_model(const CommandPlan& plan, const TrainingData& d, model::DgnConfig config,
                       const train::TrainConfig& tc, std::ostream& err,
                       train::TrainLog* log_out = nullptr) {
  (void)plan;
  config.vocab_size = d.vocab.size();
  config.charge_count = d.vocab.charge_count();
  model::Model m(config);
  train::TrainLog log = train::fit(m, d.train, d.valid, d.vocab, tc, [&](const train::EpochRecord& e) {
    err << "epoch " << e.epoch << " loss=" << fixed(e.loss, 4) << " S=" << fixed(e.valid.s, 2)
        << " EM=" << fixed(e.valid.em, 2) << " seconds=" << fixed(e.seconds, 1)
        << (e.selected ? " *" : "") << "\n";
  });
  if (log_out) *log_out = std::move(log);
  return m;
}

void train_command(const CommandPlan& plan, Artifacts& artifacts, std::ostream& out,
                   std::ostream& err) {
  const TrainingData d = load_training(plan, err);
  train::TrainLog log;
  const model::Model m = fit_model(plan, d, plan.model_config, plan.train_config, err, &log);
  model::save_checkpoint(m, artifacts.add(plan.out));
  d.vocab.save(artifacts.add(vocab_path(plan.out)), artifacts.add(charges_path(plan.out)));
  open_out(artifacts.add(plan.out.string() + ".log.csv")) << log.to_csv();
  const train::EpochRecord& best = log.selected();
  out << "selected epoch " << best.epoch << " of " << log.epochs.size() << "\n"
      << best.valid.to_text();
}

struct LoadedModel {
  model::Model model;
  data::Vocabulary vocab;
};

LoadedModel load_model(const fs::path& path) {
  model::Model m = model::load_checkpoint(path);
  data::Vocabulary vocab = data::Vocabulary::load(vocab_path(path), charges_path(path));
  if (vocab.size() != m.config().vocab_size || vocab.charge_count() != m.config().charge_count)
    throw ConfigError("vocabulary files do not match checkpoint " + path.string());
  return {std::move(m), std::move(vocab)};
}

void eval_command(const CommandPlan& plan, Artifacts& artifacts, std::ostream& out,
                  std::ostream& err) {
  std::vector<train::CasePrediction> rows;
  if (!plan.predictions.empty()) {
    rows = read_predictions(plan.predictions);
  } else {
    const LoadedModel lm = load_model(plan.model);
    rows = train::predict_records(lm.model, load_records(plan.data, err), lm.vocab);
  }
  const metrics::EvalReport report = train::evaluate_rows(rows, plan.level, plan.ps, score_table(plan));
  out << report.to_text();
  if (!plan.out.empty())
    open_out(artifacts.add(plan.out)) << metrics::EvalReport::csv_header() << report.to_csv_rows();
}

void predict_command(const CommandPlan& plan, Artifacts& artifacts, std::ostream& out,
                     std::ostream& err) {
  const LoadedModel lm = load_model(plan.model);
  const auto rows = train::predict_records(lm.model, load_records(plan.data, err), lm.vocab);
  write_predictions(artifacts.add(plan.out), rows);
  out << "wrote " << rows.size() << " prediction(s)\n";
}

void total_command(const CommandPlan& plan, Artifacts& artifacts, std::ostream& out) {
  const auto rows = train::compose_totals(read_predictions(plan.predictions));
  write_predictions(artifacts.add(plan.out), rows);
  out << "wrote " << rows.size() << " total(s)\n";
}

metrics::EvalReport score_model(const CommandPlan& plan, const model::Model& m,
                                const TrainingData& d, std::ostream& err) {
  const std::vector<data::CaseRecord> held_out =
      plan.test.empty() ? d.valid : load_records(plan.test, err);
  return train::evaluate_model(m, held_out, d.vocab, plan.level, plan.ps, score_table(plan));
}

double acc_or_nan(const metrics::EvalReport& r, double p) {
  for (const auto& [q, v] : r.acc)
    if (q == p) return v;
  return std::nan("");
}

void sweep_depth(const CommandPlan& plan, Artifacts& artifacts, std::ostream& out,
                 std::ostream& err) {
  const TrainingData d = load_training(plan, err);
  std::ofstream csv = open_out(artifacts.add(plan.out));
  csv << "depth,S,acc02,EM,acc01,best_epoch,epochs,seconds,cumulative_seconds\n";
  double cumulative = 0.0;
  for (std::size_t depth : plan.depths) {
    model::DgnConfig config = plan.model_config;
    config.depth = depth;
    err << "depth " << depth << "\n";
    train::TrainLog log;
    const model::Model m = fit_model(plan, d, config, plan.train_config, err, &log);
    const metrics::EvalReport r = score_model(plan, m, d, err);
    const double seconds = log.epochs.back().seconds;
    cumulative += seconds;
    csv << depth << "," << fixed(r.s, 4) << "," << fixed(acc_or_nan(r, 0.2), 4) << ","
        << fixed(r.em, 4) << "," << fixed(acc_or_nan(r, 0.1), 4) << "," << log.selected().epoch
        << "," << log.epochs.size() << "," << fixed(seconds, 3) << "," << fixed(cumulative, 3)
        << "\n";
    csv.flush();
    out << "depth=" << depth << " S=" << fixed(r.s, 2) << " Acc@0.2=" << fixed(acc_or_nan(r, 0.2), 2)
        << "\n";
  }
}

void compare_loss(const CommandPlan& plan, Artifacts& artifacts, std::ostream& out,
                  std::ostream& err) {
  const TrainingData d = load_training(plan, err);
  std::vector<metrics::EvalReport> reports;
  for (objective::LossKind loss : plan.losses) {
    train::TrainConfig tc = plan.train_config;
    tc.loss = loss;
    err << "loss " << objective::loss_name(loss) << "\n";
    const model::Model m = fit_model(plan, d, plan.model_config, tc, err);
    reports.push_back(score_model(plan, m, d, err));
  }
  const std::size_t unit =
      static_cast<std::size_t>(std::find(plan.losses.begin(), plan.losses.end(),
                                         objective::LossKind::kLogHuber) -
                               plan.losses.begin());
  auto metric_values = [](const metrics::EvalReport& r) {
    return std::vector<double>{r.s, r.em, acc_or_nan(r, 0.1), acc_or_nan(r, 0.2)};
  };
  const std::vector<double> base = metric_values(reports[unit]);
  std::ofstream csv = open_out(artifacts.add(plan.out));
  csv << "loss,S,EM,acc01,acc02,rel_S,rel_EM,rel_acc01,rel_acc02\n";
  for (std::size_t i = 0; i < plan.losses.size(); ++i) {
    const std::vector<double> v = metric_values(reports[i]);
    csv << objective::loss_name(plan.losses[i]);
    for (double x : v) csv << "," << fixed(x, 4);
    for (std::size_t k = 0; k < v.size(); ++k) {
      // An all-zero LHL metric leaves only "equal" (1) or "unbounded" (inf).
      const double rel = base[k] != 0.0 ? v[k] / base[k] : (v[k] == 0.0 ? 1.0 : INFINITY);
      csv << "," << (i == unit ? "1.0000" : fixed(rel, 4));
    }
    csv << "\n";
    out << objective::loss_name(plan.losses[i]) << " S=" << fixed(v[0], 2) << "\n";
  }
}

}  // namespace

int run(const CommandPlan& plan, std::ostream& out, std::ostream& err) {
  if (!plan.help_text.empty()) {
    out << plan.help_text;
    return kExitOk;
  }
  Artifacts artifacts;
  try {
    if (plan.command == "gen-data") gen_data(plan, artifacts, out);
    else if (plan.command == "extract") extract(plan, artifacts, out);
    else if (plan.command == "train") train_command(plan, artifacts, out, err);
    else if (plan.command == "eval") eval_command(plan, artifacts, out, err);
    else if (plan.command == "predict") predict_command(plan, artifacts, out, err);
    else if (plan.command == "total") total_command(plan, artifacts, out);
    else if (plan.command == "sweep-depth") sweep_depth(plan, artifacts, out, err);
    else if (plan.command == "compare-loss") compare_loss(plan, artifacts, out, err);
    else throw UsageError("unknown command '" + plan.command + "'");
  } catch (const std::exception& e) {
    artifacts.flag_partial();
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  artifacts.drop_stale_partials();
  return kExitOk;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CommandPlan plan;
  try {
    plan = parse_args(argc, argv);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for options\n";
    return kExitUsage;
  }
  return run(plan, out, err);
}

void write_predictions(const fs::path& path, std::span<const train::CasePrediction> rows) {
  std::ofstream out = open_out(path);
  out << "case_id,charge,gold_months,pred_months\n";
  for (const train::CasePrediction& r : rows) {
    if (r.case_id.find_first_of(",\n") != std::string::npos ||
        r.charge.find_first_of(",\n") != std::string::npos)
      throw FormatError("case id or charge '" + r.case_id + "/" + r.charge + "' contains a comma");
    out << r.case_id << "," << r.charge << "," << fixed(r.gold, 4) << "," << fixed(r.predicted, 4)
        << "\n";
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<train::CasePrediction> read_predictions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "case_id,charge,gold_months,pred_months")
    throw FormatError(path.string() + ": missing prediction CSV header");
  std::vector<train::CasePrediction> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 4)
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 4 fields");
    train::CasePrediction r{fields[0], fields[1], 0.0, 0.0};
    try {
      std::size_t used = 0;
      r.gold = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
      r.predicted = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dgn::cli
