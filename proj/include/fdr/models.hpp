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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fdr/dataset.hpp"
#include "fdr/nn/network.hpp"
#include "fdr/nn/optim.hpp"

namespace fdr {

enum class ModelKind : std::uint8_t { Cnn, Lstm, BiLstm };
enum class Condition : std::uint8_t { PerChannel, All };

const char* to_string(ModelKind k);
const char* to_string(Condition c);
ModelKind model_kind_from(const std::string& s);
Condition condition_from(const std::string& s);

/// The hyperparameter vector of one model: architecture plus training schedule.
struct ModelConfig {
  ModelKind kind = ModelKind::Cnn;
  Condition condition = Condition::PerChannel;
  std::size_t window = 3600;  ///< input sequence length l
  std::size_t batch_size = 64;
  std::size_t epochs = 30;  ///< N_tau
  double lr0 = 0.01;        ///< halved every epoch
  // CNN
  std::size_t filters = 128;
  std::size_t kernel_size = 3;
  std::size_t pool_size = 0;  ///< 0 disables max pooling
  // LSTM / Bi-LSTM: one or two stacked recurrent layers
  std::vector<std::size_t> lstm_units;
  /// Dense stack after the feature extractor; must end in 1 (linear output).
  std::vector<std::size_t> dense_units = {128, 64, 1};
  nn::Activation hidden_activation = nn::Activation::Relu;
  // early stopping
  bool early_stopping = true;
  std::size_t patience = 3;
  double min_delta = 0.0;
  std::uint64_t seed = 42;

  /// Throws ValidationError on inconsistent fields.
  void validate() const;
  std::vector<nn::LayerSpec> layer_specs() const;

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Full-scale hyperparameters for (kind, condition). The CNN presets can be
/// built with or without max pooling of size 2; `with_pooling` selects the
/// pooled variant, the default leaves pooling out.
ModelConfig full_preset(ModelKind kind, Condition condition, bool with_pooling = false);

/// Reduced presets for desk-scale runs: l = 200, N_tau = 8, narrower layers.
ModelConfig desk_preset(ModelKind kind, Condition condition);

/// Default target horizon for each scale.
inline constexpr std::size_t kFullHorizon = 3600;
inline constexpr std::size_t kDeskHorizon = 200;

struct Prediction {
  double raw = 0.0;      ///< network output, used for losses
  double clamped = 0.0;  ///< raw clamped to [0, 1], used for reporting
};

/// Network + the config that produced it.
class Model {
 public:
  explicit Model(ModelConfig config);
  Model(ModelConfig config, nn::Network network);

  const ModelConfig& config() const noexcept { return config_; }
  const nn::Network& network() const noexcept { return network_; }
  nn::Network& network() noexcept { return network_; }
  std::size_t parameter_count() const { return network_.parameter_count(); }

  /// Thread-safe; throws ShapeError when the window length is not config().window.
  Prediction predict(std::span<const std::uint8_t> window) const;

 private:
  ModelConfig config_;
  nn::Network network_;
};

/// CNN: conv1d -> [maxpool] -> flatten -> dense stack.
/// LSTM/Bi-LSTM: recurrent layer(s) -> dense stack. Initialized from config.seed.
Model build_model(const ModelConfig& config);

/// Window bits as an (l x 1) tensor of 0.0/1.0.
nn::Tensor window_tensor(std::span<const std::uint8_t> window);

// --- training ------------------------------------------------------------------

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;  ///< mean squared error over the epoch's updates
  double val_loss = 0.0;    ///< J(M, theta, tau): sum of squared errors over the val split
  double val_mse = 0.0;     ///< val_loss / |val|
  double lr = 0.0;
};

struct TrainOptions {
  /// Called with the dataset position of every example used for a gradient
  /// update, in visiting order. Instrumentation for tests.
  std::function<void(std::size_t)> on_example;
};

/// Example visiting order for one epoch: a seeded shuffle of the train split
/// for the CNN, chronological order for recurrent models.
std::vector<std::size_t> epoch_order(const ModelConfig& config, const WindowedDataset& data, std::size_t epoch);

/// One pass over the train split in minibatches of config.batch_size with
/// Adam at lr_at_epoch(lr0, epoch). Returns the epoch's mean training loss.
double train_epoch(Model& model, nn::AdamState& adam, const WindowedDataset& data, std::size_t epoch,
                   const TrainOptions& options = {});

struct TrainedModel {
  Model model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

struct FitOptions {
  TrainOptions train;
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Trains up to config.epochs epochs, recording the validation loss each
/// epoch, with early stopping and best-weight restore.
TrainedModel fit(Model model, const WindowedDataset& data, const FitOptions& options = {});

/// Predictions for every example of `split`, in dataset order.
std::vector<Prediction> predict_split(const Model& model, const WindowedDataset& data, Split split);
std::vector<double> targets_of(const WindowedDataset& data, Split split);

/// Sum over the split of (target - raw prediction)^2.
double sum_squared_error(const Model& model, const WindowedDataset& data, Split split);

// --- persistence ---------------------------------------------------------------

void save_model(const std::filesystem::path& path, const Model& model, std::size_t epoch = 0, double lr = 0.0);
Model load_model(const std::filesystem::path& path);

std::string history_csv(const std::vector<EpochRecord>& history);

/// Writes config.json, history.csv and model.ckpt (best weights) into `dir`.
void save_run(const std::filesystem::path& dir, const TrainedModel& trained);

}  // namespace fdr
