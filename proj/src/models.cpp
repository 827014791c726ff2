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

#include "fdr/models.hpp"

#include <algorithm>

#include <json.hpp>

#include "fdr/error.hpp"
#include "fdr/nn/checkpoint.hpp"
#include "fdr/util.hpp"

namespace fdr {

using nlohmann::json;
using nn::Activation;
using nn::LayerSpec;

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Cnn: return "cnn";
    case ModelKind::Lstm: return "lstm";
    case ModelKind::BiLstm: return "bilstm";
  }
  return "?";
}

const char* to_string(Condition c) { return c == Condition::PerChannel ? "ch" : "all"; }

ModelKind model_kind_from(const std::string& s) {
  if (s == "cnn" || s == "CNN") return ModelKind::Cnn;
  if (s == "lstm" || s == "LSTM") return ModelKind::Lstm;
  if (s == "bilstm" || s == "Bi-LSTM" || s == "bi-lstm") return ModelKind::BiLstm;
  throw ValidationError("unknown model kind '" + s + "' (expected cnn, lstm or bilstm)");
}

Condition condition_from(const std::string& s) {
  if (s == "ch" || s == "per-channel") return Condition::PerChannel;
  if (s == "all") return Condition::All;
  throw ValidationError("unknown condition '" + s + "' (expected ch or all)");
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* what) {
    if (v == 0) throw ValidationError(std::string(what) + " must be positive");
  };
  positive(window, "window");
  positive(batch_size, "batch_size");
  positive(epochs, "epochs");
  if (!(lr0 > 0.0)) throw ValidationError("lr0 must be positive");
  if (dense_units.empty() || dense_units.back() != 1) {
    throw ValidationError("dense stack must end in a single output unit");
  }
  for (auto u : dense_units) positive(u, "dense units");
  if (hidden_activation == Activation::Tanh) {
    throw ValidationError("hidden dense activation must be relu or linear");
  }
  if (kind == ModelKind::Cnn) {
    positive(filters, "filters");
    positive(kernel_size, "kernel_size");
    if (window < kernel_size) throw ValidationError("window shorter than the convolution kernel");
    if (pool_size > 0 && window - kernel_size + 1 < pool_size) {
      throw ValidationError("pooling size exceeds the convolution output length");
    }
  } else {
    if (lstm_units.empty() || lstm_units.size() > 2) {
      throw ValidationError("recurrent models take one or two stacked layers");
    }
    for (auto u : lstm_units) positive(u, "lstm units");
  }
  if (min_delta < 0.0) throw ValidationError("min_delta must be nonnegative");
}

std::vector<LayerSpec> ModelConfig::layer_specs() const {
  validate();
  std::vector<LayerSpec> specs;
  auto idx = [](std::size_t v) { return static_cast<nn::Index>(v); };
  switch (kind) {
    case ModelKind::Cnn:
      specs.push_back(LayerSpec::conv1d(idx(filters), idx(kernel_size), Activation::Relu));
      if (pool_size > 0) specs.push_back(LayerSpec::maxpool1d(idx(pool_size)));
      specs.push_back(LayerSpec::flatten());
      break;
    case ModelKind::Lstm:
    case ModelKind::BiLstm:
      for (std::size_t k = 0; k < lstm_units.size(); ++k) {
        bool seq = k + 1 < lstm_units.size();
        specs.push_back(kind == ModelKind::Lstm ? LayerSpec::lstm(idx(lstm_units[k]), seq)
                                                : LayerSpec::bilstm(idx(lstm_units[k]), seq));
      }
      break;
  }
  for (std::size_t k = 0; k < dense_units.size(); ++k) {
    bool last = k + 1 == dense_units.size();
    specs.push_back(LayerSpec::dense(idx(dense_units[k]), last ? Activation::Linear : hidden_activation));
  }
  return specs;
}

std::string ModelConfig::to_json() const {
  json j;
  j["model"] = to_string(kind);
  j["condition"] = to_string(condition);
  j["input_sequence_length"] = window;
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["optimizer"] = "adam";
  j["loss"] = "mse";
  j["learning_rate"] = lr0;
  j["lr_decay"] = "halving";
  if (kind == ModelKind::Cnn) {
    j["filters"] = filters;
    j["kernel_size"] = kernel_size;
    j["pooling"] = pool_size;
  } else {
    j["lstm_units"] = lstm_units;
  }
  j["dense_units"] = dense_units;
  j["activation"] = kind == ModelKind::Cnn ? "relu" : "tanh";
  j["hidden_dense_activation"] = nn::to_string(hidden_activation);
  j["early_stopping"] = {{"enabled", early_stopping}, {"patience", patience}, {"min_delta", min_delta}};
  j["seed"] = seed;
  return j.dump(2);
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  ModelConfig c;
  try {
    json j = json::parse(text);
    c.kind = model_kind_from(j.at("model").get<std::string>());
    c.condition = condition_from(j.value("condition", std::string("ch")));
    c.window = j.at("input_sequence_length").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.lr0 = j.at("learning_rate").get<double>();
    if (c.kind == ModelKind::Cnn) {
      c.filters = j.at("filters").get<std::size_t>();
      c.kernel_size = j.at("kernel_size").get<std::size_t>();
      c.pool_size = j.value("pooling", std::size_t{0});
      c.lstm_units.clear();
    } else {
      c.lstm_units = j.at("lstm_units").get<std::vector<std::size_t>>();
    }
    c.dense_units = j.at("dense_units").get<std::vector<std::size_t>>();
    c.hidden_activation = nn::activation_from(j.value("hidden_dense_activation", std::string("relu")));
    if (j.contains("early_stopping")) {
      const auto& es = j["early_stopping"];
      c.early_stopping = es.value("enabled", true);
      c.patience = es.value("patience", std::size_t{3});
      c.min_delta = es.value("min_delta", 0.0);
    }
    c.seed = j.value("seed", std::uint64_t{42});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model config: ") + e.what());
  }
  c.validate();
  return c;
}

ModelConfig full_preset(ModelKind kind, Condition condition, bool with_pooling) {
  ModelConfig c;
  c.kind = kind;
  c.condition = condition;
  const bool all = condition == Condition::All;
  if (kind == ModelKind::Cnn) {
    c.window = 3600;
    c.batch_size = all ? 128 : 64;
    c.epochs = all ? 40 : 30;
    c.lr0 = all ? 0.005 : 0.01;
    c.filters = all ? 256 : 128;
    c.kernel_size = all ? 5 : 3;
    c.pool_size = with_pooling ? 2 : 0;
    c.dense_units = all ? std::vector<std::size_t>{256, 128, 64, 1} : std::vector<std::size_t>{128, 64, 1};
  } else {
    c.window = 1200;
    c.batch_size = all ? 64 : 32;
    c.epochs = all ? 25 : 15;
    c.lr0 = all ? 0.005 : 0.01;
    c.lstm_units = all ? std::vector<std::size_t>{25, 50} : std::vector<std::size_t>{25};
    c.dense_units = all ? std::vector<std::size_t>{8, 1} : std::vector<std::size_t>{1};
  }
  return c;
}

ModelConfig desk_preset(ModelKind kind, Condition condition) {
  ModelConfig c = full_preset(kind, condition);
  const bool all = condition == Condition::All;
  c.window = 200;
  c.epochs = 8;
  if (kind == ModelKind::Cnn) {
    c.filters = all ? 32 : 16;
    c.dense_units = all ? std::vector<std::size_t>{64, 32, 16, 1} : std::vector<std::size_t>{32, 16, 1};
  }
  return c;
}

nn::Tensor window_tensor(std::span<const std::uint8_t> window) {
  nn::Tensor x(static_cast<nn::Index>(window.size()), 1);
  for (std::size_t i = 0; i < window.size(); ++i) x(static_cast<nn::Index>(i), 0) = window[i];
  return x;
}

Model::Model(ModelConfig config)
    : config_(std::move(config)),
      network_(nn::Shape{static_cast<nn::Index>(config_.window), 1}, config_.layer_specs()) {
  network_.initialize(config_.seed);
}

Model::Model(ModelConfig config, nn::Network network) : config_(std::move(config)), network_(std::move(network)) {
  if (network_.input_shape() != nn::Shape{static_cast<nn::Index>(config_.window), 1}) {
    throw ShapeError("network input does not match the configured window length");
  }
  if (network_.output_shape() != nn::Shape{1, 1}) throw ShapeError("regression network must output one value");
}

Prediction Model::predict(std::span<const std::uint8_t> window) const {
  if (window.size() != config_.window) {
    throw ShapeError("window has " + std::to_string(window.size()) + " outcomes, model expects " +
                     std::to_string(config_.window));
  }
  double raw = network_.forward(window_tensor(window))(0, 0);
  return {raw, std::clamp(raw, 0.0, 1.0)};
}

Model build_model(const ModelConfig& config) { return Model(config); }

// --- persistence ---------------------------------------------------------------

void save_model(const std::filesystem::path& path, const Model& model, std::size_t epoch, double lr) {
  json meta;
  meta["config"] = json::parse(model.config().to_json());
  meta["epoch"] = epoch;
  meta["lr"] = lr;
  meta["seed"] = model.config().seed;
  nn::save_checkpoint(path, model.network(), meta.dump());
}

Model load_model(const std::filesystem::path& path) {
  auto ckpt = nn::load_checkpoint(path);
  json meta = json::parse(ckpt.metadata_json);
  if (!meta.contains("config")) throw FormatError("checkpoint carries no model config");
  return Model(ModelConfig::from_json(meta["config"].dump()), std::move(ckpt.network));
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,val_loss,lr\n";
  for (const auto& h : history) {
    out += std::to_string(h.epoch) + "," + format_double(h.train_loss) + "," + format_double(h.val_loss) + "," +
           format_double(h.lr) + "\n";
  }
  return out;
}

void save_run(const std::filesystem::path& dir, const TrainedModel& trained) {
  std::filesystem::create_directories(dir);
  write_file_text(dir / "config.json", trained.model.config().to_json() + "\n");
  write_file_text(dir / "history.csv", history_csv(trained.history));
  double lr = trained.best_epoch > 0 ? nn::lr_at_epoch(trained.model.config().lr0, trained.best_epoch) : 0.0;
  save_model(dir / "model.ckpt", trained.model, trained.best_epoch, lr);
}

}  // namespace fdr
