// Copyright 2026 The fdrpred Authors
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

// fdrpred: command-line driver for simulation, dataset preparation, training,
// hyperparameter search, evaluation and inference profiling.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fdr/dataset.hpp"
#include "fdr/error.hpp"
#include "fdr/eval.hpp"
#include "fdr/hpo.hpp"
#include "fdr/models.hpp"
#include "fdr/trace.hpp"
#include "fdr/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace fdr;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool force = false;
  bool desk = false;
  std::size_t jobs = 1;
  std::vector<std::string> argv;
};

// --- run bookkeeping -------------------------------------------------------------

/// Collects the inputs and outputs of one command and writes its manifest.
class Run {
 public:
  Run(const Globals& g, std::string command) : g_(g), command_(std::move(command)) {}

  fs::path out(const std::string& name) const { return fs::path(g_.out) / name; }

  /// Refuses to start when any planned output already exists, unless --force.
  void plan(const std::vector<std::string>& names) {
    std::vector<std::string> all = names;
    all.push_back(manifest_name());
    for (const auto& n : all) {
      fs::path p = out(n);
      if (fs::exists(p) && !g_.force) {
        throw ValidationError(p.string() + " exists; pass --force to overwrite");
      }
    }
    fs::create_directories(g_.out);
  }

  void input(const fs::path& path) { inputs_.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}}); }

  void write(const std::string& name, const std::string& text) {
    write_file_text(out(name), text);
    record(name);
  }
  void write(const std::string& name, const std::vector<std::uint8_t>& bytes) {
    write_file_bytes(out(name), bytes);
    record(name);
  }
  /// For files produced by library calls that write directly.
  void record(const std::string& name) {
    outputs_.push_back({{"path", out(name).string()}, {"sha256", sha256_file(out(name))}});
  }

  json config = json::object();
  std::optional<std::uint64_t> seed;

  void finish() {
    json m;
    m["format"] = "fdr-run-manifest";
    m["version"] = 1;
    m["command"] = command_;
    m["argv"] = g_.argv;
    m["config"] = config;
    m["inputs"] = inputs_;
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["tool_version"] = FDR_VERSION;
    m["outputs"] = outputs_;
    write_file_text(out(manifest_name()), m.dump(2) + "\n");
  }

 private:
  std::string manifest_name() const { return command_ + ".manifest.json"; }

  const Globals& g_;
  std::string command_;
  json inputs_ = json::array();
  json outputs_ = json::array();
};

std::string channel_label(std::uint32_t channel) { return "ch" + std::to_string(channel); }

// --- simulate ----------------------------------------------------------------------

struct SimulateOpts {
  std::string preset;
  std::optional<std::size_t> n;
  std::optional<double> p_gb, p_bg, e_g, e_b, drift_amplitude, drift_period;
  std::optional<std::uint32_t> channel;
  std::string name;
};

int cmd_simulate(const Globals& g, const SimulateOpts& o) {
  const std::size_t n = o.n.value_or(g.desk ? 100'000 : 1'000'000);
  std::vector<std::pair<std::string, GEChannelSpec>> specs;
  if (o.preset == "all") {
    for (const auto& name : channel_preset_names()) specs.emplace_back(name, channel_preset(name));
  } else if (!o.preset.empty()) {
    specs.emplace_back(o.preset, channel_preset(o.preset));
  } else {
    specs.emplace_back(o.name.empty() ? "custom" : o.name, calibrated_channel_spec());
  }
  for (std::size_t k = 0; k < specs.size(); ++k) {
    GEChannelSpec& s = specs[k].second;
    if (o.p_gb) s.p_gb = *o.p_gb;
    if (o.p_bg) s.p_bg = *o.p_bg;
    if (o.e_g) s.e_g = *o.e_g;
    if (o.e_b) s.e_b = *o.e_b;
    if (o.drift_amplitude) s.drift.amplitude = *o.drift_amplitude;
    if (o.drift_period) s.drift.period_samples = *o.drift_period;
    if (o.channel) s.channel_id = *o.channel;
    if (g.seed) s.seed = *g.seed + k;
    s.validate();
  }

  Run run(g, "simulate");
  std::vector<std::string> names;
  for (const auto& [name, spec] : specs) {
    names.push_back(name + ".csv");
    names.push_back(name + ".fdr");
  }
  if (specs.size() > 1) names.push_back("all.json");
  run.plan(names);

  json concat;
  concat["format"] = "fdr-concat-manifest";
  concat["channels"] = json::array();
  std::vector<OutcomeTrace> traces;
  for (const auto& [name, spec] : specs) {
    OutcomeTrace t = simulate_trace(spec, n);
    run.write(name + ".csv", format_trace_text(t));
    run.write(name + ".fdr", encode_packed(t));
    TraceStats st = trace_stats(t);
    std::printf("%-10s n=%zu channel=%u success=%.4f window_std=%.4f\n", name.c_str(), t.size(), t.channel_id(),
                st.mean_fdr, st.std_fdr);
    run.config["channels"][name] = {{"p_gb", spec.p_gb},
                                    {"p_bg", spec.p_bg},
                                    {"e_g", spec.e_g},
                                    {"e_b", spec.e_b},
                                    {"drift_amplitude", spec.drift.amplitude},
                                    {"drift_period", spec.drift.period_samples},
                                    {"seed", spec.seed},
                                    {"channel", spec.channel_id}};
    concat["channels"].push_back(
        {{"name", name}, {"path", name + ".fdr"}, {"sha256", trace_hash(t)}, {"length", t.size()}});
    traces.push_back(std::move(t));
  }
  if (specs.size() > 1) {
    concat["length"] = n * traces.size();
    concat["sha256"] = trace_hash(concatenate(traces));
    run.write("all.json", concat.dump(2) + "\n");
  }
  run.config["n"] = n;
  run.seed = specs.front().second.seed;
  run.finish();
  return 0;
}

// --- import --------------------------------------------------------------------------

int cmd_import(const Globals& g, const std::string& input) {
  OutcomeTrace t = load_trace(input);
  std::string stem = fs::path(input).stem().string();
  Run run(g, "import");
  run.plan({stem + ".csv", stem + ".fdr"});
  run.input(input);
  run.write(stem + ".csv", format_trace_text(t));
  run.write(stem + ".fdr", encode_packed(t));
  run.config["samples"] = t.size();
  run.config["channel"] = t.channel_id();
  run.config["period_s"] = t.period_s();
  run.finish();
  std::printf("imported %zu outcomes (channel %u, success %.4f)\n", t.size(), t.channel_id(), t.success_ratio());
  return 0;
}

// --- prepare -------------------------------------------------------------------------

struct PrepareOpts {
  std::vector<std::string> traces;
  std::string model = "cnn";
  std::optional<std::size_t> window, horizon;
  std::size_t stride = 1;
  std::vector<double> fractions = {0.6, 0.2, 0.2};
};

std::size_t default_window(const Globals& g, ModelKind kind) {
  return g.desk ? desk_preset(kind, Condition::PerChannel).window : full_preset(kind, Condition::PerChannel).window;
}

int cmd_prepare(const Globals& g, const PrepareOpts& o) {
  if (o.fractions.size() != 3) throw ValidationError("--fractions takes three values: train,val,test");
  ModelKind kind = model_kind_from(o.model);
  const std::size_t l = o.window.value_or(default_window(g, kind));
  const std::size_t h = o.horizon.value_or(g.desk ? kDeskHorizon : kFullHorizon);
  SplitFractions f{o.fractions[0], o.fractions[1], o.fractions[2]};

  // Shortest trace that still yields three examples plus two guard gaps.
  const std::size_t gap = guard_gap(l, h, o.stride);
  const std::size_t min_len = l + h + (2 + 2 * gap) * o.stride;

  Run run(g, "prepare");
  run.plan({"dataset.json"});
  std::vector<WindowedDataset> parts;
  std::vector<std::string> paths;
  for (const auto& p : o.traces) {
    auto t = std::make_shared<const OutcomeTrace>(load_trace(p));
    if (t->size() < min_len) {
      throw ValidationError(p + " has " + std::to_string(t->size()) + " samples; l=" + std::to_string(l) +
                            ", N_f=" + std::to_string(h) + " need a minimum length of " + std::to_string(min_len));
    }
    run.input(p);
    parts.push_back(split_chronological(make_windows(t, l, h, o.stride), f));
    paths.push_back(fs::absolute(p).string());
  }
  WindowedDataset all = concat_datasets(parts);
  json j = json::parse(describe(all).to_json());
  j["trace_paths"] = paths;
  run.write("dataset.json", j.dump(2) + "\n");
  run.config = {{"window", l}, {"horizon", h}, {"stride", o.stride}, {"fractions", o.fractions}, {"gap", gap}};
  run.finish();
  std::printf("l=%zu N_f=%zu stride=%zu gap=%zu: train %zu, val %zu, test %zu examples over %zu trace(s)\n", l, h,
              o.stride, gap, all.count(Split::Train), all.count(Split::Val), all.count(Split::Test), parts.size());
  return 0;
}

/// Loads dataset.json written by `prepare` and rebuilds the split dataset.
WindowedDataset load_dataset(const std::string& path, Run& run) {
  json j = json::parse(read_file_text(path));
  DatasetManifest m = DatasetManifest::from_json(j.dump());
  if (!j.contains("trace_paths")) throw ValidationError(path + " lists no trace paths");
  std::vector<std::shared_ptr<const OutcomeTrace>> traces;
  run.input(path);
  for (const auto& p : j.at("trace_paths")) {
    traces.push_back(std::make_shared<const OutcomeTrace>(load_trace(p.get<std::string>())));
  }
  return apply_manifest(m, std::move(traces));
}

// --- model configuration -------------------------------------------------------------

struct ModelOpts {
  std::string model = "cnn";
  std::string condition = "ch";
  std::optional<std::uint32_t> source;
  std::optional<std::size_t> window, batch_size, epochs, filters, kernel_size, pool, patience;
  std::optional<double> lr;
  std::vector<std::size_t> units, dense;
  bool with_pooling = false;
  bool no_early_stopping = false;
};

void add_model_options(CLI::App* cmd, ModelOpts& o) {
  cmd->add_option("--model", o.model, "cnn, lstm or bilstm")->check(CLI::IsMember({"cnn", "lstm", "bilstm"}));
  cmd->add_option("--condition", o.condition, "ch (one channel) or all")->check(CLI::IsMember({"ch", "all"}));
  cmd->add_option("--source", o.source, "channel id to train on when the dataset holds several (condition ch)");
  cmd->add_option("--window", o.window, "input sequence length l (must match the dataset)");
  cmd->add_option("--batch-size", o.batch_size);
  cmd->add_option("--epochs", o.epochs);
  cmd->add_option("--lr", o.lr, "initial learning rate, halved every epoch");
  cmd->add_option("--filters", o.filters);
  cmd->add_option("--kernel-size", o.kernel_size);
  cmd->add_option("--pool", o.pool, "max-pooling size, 0 disables");
  cmd->add_option("--units", o.units, "recurrent units, one or two layers")->delimiter(',');
  cmd->add_option("--dense", o.dense, "dense stack, ending in 1")->delimiter(',');
  cmd->add_option("--patience", o.patience);
  cmd->add_flag("--pooling", o.with_pooling, "add max pooling of size 2 to the CNN preset");
  cmd->add_flag("--no-early-stopping", o.no_early_stopping);
}

ModelConfig resolve_config(const Globals& g, const ModelOpts& o, std::size_t dataset_window) {
  ModelKind kind = model_kind_from(o.model);
  Condition cond = condition_from(o.condition);
  ModelConfig c = g.desk ? desk_preset(kind, cond) : full_preset(kind, cond, o.with_pooling);
  if (g.desk && o.with_pooling && kind == ModelKind::Cnn) c.pool_size = 2;
  if (o.window && *o.window != dataset_window) {
    throw ValidationError("config conflict: window " + std::to_string(*o.window) + " but the dataset was prepared with l=" +
                          std::to_string(dataset_window));
  }
  c.window = dataset_window;
  if (o.batch_size) c.batch_size = *o.batch_size;
  if (o.epochs) c.epochs = *o.epochs;
  if (o.lr) c.lr0 = *o.lr;
  if (o.filters) c.filters = *o.filters;
  if (o.kernel_size) c.kernel_size = *o.kernel_size;
  if (o.pool) c.pool_size = *o.pool;
  if (!o.units.empty()) c.lstm_units = o.units;
  if (!o.dense.empty()) c.dense_units = o.dense;
  if (o.patience) c.patience = *o.patience;
  if (o.no_early_stopping) c.early_stopping = false;
  if (g.seed) c.seed = *g.seed;
  c.validate();
  return c;
}

/// The dataset a model of condition `cond` trains on.
WindowedDataset select_sources(const WindowedDataset& data, const ModelOpts& o) {
  if (o.condition == "all" || data.sources().size() == 1) return data;
  if (!o.source) {
    throw ValidationError("dataset has " + std::to_string(data.sources().size()) +
                          " traces; pass --source <channel> or --condition all");
  }
  for (std::uint32_t s = 0; s < data.sources().size(); ++s) {
    if (data.sources()[s]->channel_id() == *o.source) return data.only_source(s);
  }
  throw ValidationError("dataset has no trace with channel " + std::to_string(*o.source));
}

// --- train -----------------------------------------------------------------------------

int cmd_train(const Globals& g, const std::string& dataset_path, const ModelOpts& o) {
  Run run(g, "train");
  run.plan({"config.json", "history.csv", "model.ckpt"});
  WindowedDataset data = select_sources(load_dataset(dataset_path, run), o);
  ModelConfig c = resolve_config(g, o, data.window_length());
  run.config = json::parse(c.to_json());
  run.seed = c.seed;

  std::printf("training %s (%s), %zu parameters, %zu train / %zu val examples\n", to_string(c.kind),
              to_string(c.condition), build_model(c).parameter_count(), data.count(Split::Train),
              data.count(Split::Val));
  FitOptions fo;
  fo.on_epoch = [](const EpochRecord& r) {
    std::printf("epoch %2zu  lr %.6g  train_mse %.6f  val_J %.6f  val_mse %.6f\n", r.epoch, r.lr, r.train_loss,
                r.val_loss, r.val_mse);
    std::fflush(stdout);
  };
  TrainedModel t = fit(build_model(c), data, fo);
  save_run(g.out, t);
  for (const char* f : {"config.json", "history.csv", "model.ckpt"}) run.record(f);
  run.finish();
  std::printf("best epoch %zu%s\n", t.best_epoch, t.stopped_early ? " (stopped early)" : "");
  return 0;
}

// --- tune ------------------------------------------------------------------------------

int cmd_tune(const Globals& g, const std::string& dataset_path, const ModelOpts& o, std::size_t budget) {
  Run run(g, "tune");
  run.plan({"trials.csv", "summary.json", "boxplot.csv", "best_config.json"});
  WindowedDataset data = load_dataset(dataset_path, run);
  ModelConfig base = resolve_config(g, o, data.window_length());

  std::vector<WindowedDataset> per;
  std::vector<LabeledDataset> sets;
  if (o.condition == "all" || data.sources().size() == 1) {
    per.push_back(data);
  } else {
    for (std::uint32_t s = 0; s < data.sources().size(); ++s) per.push_back(data.only_source(s));
  }
  for (const auto& d : per) {
    std::string label = o.condition == "all" ? "all" : channel_label(d.sources()[d[0].source]->channel_id());
    sets.push_back({label, &d});
  }

  SearchOptions so;
  so.budget = budget;
  so.seed = g.seed.value_or(so.seed);
  so.jobs = g.jobs;
  SearchSpace space = SearchSpace::around(base);
  std::printf("searching %zu of %zu configurations on %zu dataset(s)\n", std::min(budget, space.cardinality()),
              space.cardinality(), sets.size());
  SearchResult r = search(space, sets, so);
  run.write("trials.csv", trial_ledger_csv(r.trials));
  run.write("summary.json", search_summary_json(r) + "\n");
  run.write("boxplot.csv", box_plot_csv(r));
  run.write("best_config.json", r.best.to_json() + "\n");
  run.config = {{"base", json::parse(base.to_json())}, {"budget", budget}, {"jobs", g.jobs}};
  run.seed = so.seed;
  run.finish();
  for (std::size_t k = 0; k < r.ranking.size(); ++k) {
    const auto& c = r.ranking[k];
    std::printf("%2zu. candidate %zu  J-bar %.6f  (%.6f per example)  %zu parameters\n", k + 1, c.candidate_id,
                c.objective, c.objective_mean, c.parameter_count);
  }
  return 0;
}

// --- evaluate --------------------------------------------------------------------------

int cmd_evaluate(const Globals& g, const std::vector<std::string>& model_files, const std::string& dataset_path) {
  Run run(g, "evaluate");
  run.plan({"metrics.csv", "metrics.txt", "errors.csv"});
  WindowedDataset data = load_dataset(dataset_path, run);
  std::vector<MetricsReport> reports;
  std::string errors = "model_file,test_ch,index,error\n";
  for (const auto& mf : model_files) {
    run.input(mf);
    Model m = load_model(mf);
    if (m.config().window != data.window_length()) {
      throw ValidationError(mf + " expects l=" + std::to_string(m.config().window) + ", dataset has l=" +
                            std::to_string(data.window_length()));
    }
    for (std::uint32_t s = 0; s < data.sources().size(); ++s) {
      WindowedDataset one = data.only_source(s);
      ErrorSeries es = error_series(m, one);
      MetricsReport r = metrics_report(es.clamped);
      r.test_channel = channel_label(data.sources()[s]->channel_id());
      r.train_condition = to_string(m.config().condition);
      r.model = to_string(m.config().kind);
      reports.push_back(r);
      auto idx = one.indices(Split::Test);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        errors += mf + "," + r.test_channel + "," + std::to_string(one[idx[j]].index) + "," +
                  format_double(es.clamped[j]) + "\n";
      }
    }
  }
  run.write("metrics.csv", metrics_csv(reports));
  std::string table = metrics_table(reports);
  run.write("metrics.txt", table);
  run.write("errors.csv", errors);
  run.config = {{"models", model_files}, {"sign", "prediction - target"}, {"percentile", "nearest-rank"}};
  run.finish();
  std::fputs(table.c_str(), stdout);
  return 0;
}

// --- profile ---------------------------------------------------------------------------

int cmd_profile(const Globals& g, const std::vector<std::string>& model_files, const std::string& condition,
                std::size_t repetitions) {
  Run run(g, "profile");
  run.plan({"profile.csv"});
  std::vector<Model> models;
  if (model_files.empty()) {
    Condition cond = condition_from(condition);
    for (ModelKind k : {ModelKind::Cnn, ModelKind::Lstm, ModelKind::BiLstm}) {
      ModelConfig c = g.desk ? desk_preset(k, cond) : full_preset(k, cond);
      if (g.seed) c.seed = *g.seed;
      models.push_back(build_model(c));
    }
  } else {
    for (const auto& mf : model_files) {
      run.input(mf);
      models.push_back(load_model(mf));
    }
  }
  std::mt19937_64 rng(g.seed.value_or(1));
  std::vector<ResourceProfile> rows;
  for (const Model& m : models) {
    std::vector<std::vector<std::uint8_t>> windows(8, std::vector<std::uint8_t>(m.config().window));
    std::bernoulli_distribution bit(0.85);
    for (auto& w : windows)
      for (auto& b : w) b = bit(rng) ? 1 : 0;
    rows.push_back(profile_inference(m, windows, repetitions));
    const auto& p = rows.back();
    std::printf("%-7s %-4s %9.4f ms  working %.4f MB (peak %.4f MB)  weights %.4f MB  [%s]\n", p.model.c_str(),
                p.condition.c_str(), p.mean_ms, p.mem_mb, p.peak_mb, p.param_mb, p.method.c_str());
  }
  run.write("profile.csv", profile_csv(rows));
  run.config = {{"repetitions", repetitions}, {"memory_method", rows.empty() ? "" : rows.front().method}};
  run.seed = g.seed;
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame delivery ratio prediction toolkit"};
  app.set_version_flag("--version", FDR_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file with option defaults; command-line flags take precedence");

  Globals g;
  g.argv.assign(argv + 1, argv + argc);
  app.add_option("--seed", g.seed, "seed override for simulation, initialization and search");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_flag("--force", g.force, "overwrite existing outputs");
  app.add_flag("--desk-scale", g.desk, "use the reduced presets (l = N_f = 200, 8 epochs, 1e5-sample traces)");
  app.add_option("--jobs", g.jobs, "parallel trials for tune")->check(CLI::PositiveNumber);

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "simulate Gilbert-Elliott outcome traces");
  c_sim->add_option("--preset", sim.preset, "synth-ch1, synth-ch5, synth-ch9, synth-ch13 or all");
  c_sim->add_option("-n,--samples", sim.n, "samples per trace");
  c_sim->add_option("--p-gb", sim.p_gb);
  c_sim->add_option("--p-bg", sim.p_bg);
  c_sim->add_option("--e-g", sim.e_g);
  c_sim->add_option("--e-b", sim.e_b);
  c_sim->add_option("--drift-amplitude", sim.drift_amplitude);
  c_sim->add_option("--drift-period", sim.drift_period, "in samples");
  c_sim->add_option("--channel", sim.channel);
  c_sim->add_option("--name", sim.name, "output file stem for a custom spec");

  std::string import_input;
  auto* c_imp = app.add_subcommand("import", "convert a text or packed trace into both formats");
  c_imp->add_option("input", import_input)->required()->check(CLI::ExistingFile);

  PrepareOpts prep;
  auto* c_prep = app.add_subcommand("prepare", "window, label and split traces");
  c_prep->add_option("--trace", prep.traces, "trace files")->required()->check(CLI::ExistingFile);
  c_prep->add_option("--model", prep.model, "model whose preset l is the default window");
  c_prep->add_option("--window", prep.window, "input sequence length l");
  c_prep->add_option("--horizon", prep.horizon, "target horizon N_f");
  c_prep->add_option("--stride", prep.stride)->check(CLI::PositiveNumber);
  c_prep->add_option("--fractions", prep.fractions, "train,val,test")->delimiter(',');

  std::string dataset;
  ModelOpts train_opts;
  auto* c_train = app.add_subcommand("train", "train one model");
  c_train->add_option("--dataset", dataset, "dataset.json from prepare")->required()->check(CLI::ExistingFile);
  add_model_options(c_train, train_opts);

  ModelOpts tune_opts;
  std::size_t budget = 8;
  auto* c_tune = app.add_subcommand("tune", "random hyperparameter search");
  c_tune->add_option("--dataset", dataset, "dataset.json from prepare")->required()->check(CLI::ExistingFile);
  c_tune->add_option("--budget", budget, "number of configurations to try")->check(CLI::PositiveNumber);
  add_model_options(c_tune, tune_opts);

  std::vector<std::string> model_files;
  auto* c_eval = app.add_subcommand("evaluate", "error statistics on the test split");
  c_eval->add_option("--model-file", model_files, "model.ckpt files")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--dataset", dataset, "dataset.json from prepare")->required()->check(CLI::ExistingFile);

  std::vector<std::string> profile_models;
  std::string profile_condition = "ch";
  std::size_t repetitions = 1000;
  auto* c_prof = app.add_subcommand("profile", "single-window inference time and memory");
  c_prof->add_option("--model-file", profile_models, "model.ckpt files; default: the three preset models")
      ->check(CLI::ExistingFile);
  c_prof->add_option("--condition", profile_condition)->check(CLI::IsMember({"ch", "all"}));
  c_prof->add_option("--repetitions", repetitions)->check(CLI::Range(100, 100'000'000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*c_sim) return cmd_simulate(g, sim);
    if (*c_imp) return cmd_import(g, import_input);
    if (*c_prep) return cmd_prepare(g, prep);
    if (*c_train) return cmd_train(g, dataset, train_opts);
    if (*c_tune) return cmd_tune(g, dataset, tune_opts, budget);
    if (*c_eval) return cmd_evaluate(g, model_files, dataset);
    if (*c_prof) return cmd_profile(g, profile_models, profile_condition, repetitions);
  } catch (const fdr::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
