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

#include <algorithm>
#include <cmath>
#include <random>

#include "fdr/error.hpp"
#include "fdr/models.hpp"
#include "fdr/util.hpp"

namespace fdr {

std::vector<std::size_t> epoch_order(const ModelConfig& config, const WindowedDataset& data, std::size_t epoch) {
  std::vector<std::size_t> order = data.indices(Split::Train);
  if (config.kind == ModelKind::Cnn) {
    std::mt19937_64 rng(mix_seed(config.seed ^ mix_seed(epoch)));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
  } else {
    // Chronological within each source; sources in dataset order.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Example& ea = data[a];
      const Example& eb = data[b];
      return ea.source != eb.source ? ea.source < eb.source : ea.index < eb.index;
    });
  }
  return order;
}

double train_epoch(Model& model, nn::AdamState& adam, const WindowedDataset& data, std::size_t epoch,
                   const TrainOptions& options) {
  const ModelConfig& cfg = model.config();
  if (data.window_length() != cfg.window) throw ShapeError("dataset window length differs from the model's");
  auto order = epoch_order(cfg, data, epoch);
  if (order.empty()) throw ValidationError("train split is empty");

  const double lr = nn::lr_at_epoch(cfg.lr0, epoch);
  nn::Network& net = model.network();
  auto params = net.parameters();
  nn::Gradients grads = net.zero_gradients();
  nn::Workspace ws;
  nn::Tensor dy(1, 1);
  double loss_sum = 0.0;

  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
    const double scale = 2.0 / static_cast<double>(stop - start);
    for (auto& g : grads) g.setZero();
    for (std::size_t b = start; b < stop; ++b) {
      const std::size_t k = order[b];
      if (options.on_example) options.on_example(k);
      double pred = net.forward(window_tensor(data.window(k)), ws)(0, 0);
      double err = pred - data[k].target;
      loss_sum += err * err;
      dy(0, 0) = scale * err;
      net.backward(dy, ws, grads);
    }
    nn::adam_step(params, grads, adam, lr);
  }
  return loss_sum / static_cast<double>(order.size());
}

std::vector<Prediction> predict_split(const Model& model, const WindowedDataset& data, Split split) {
  if (data.window_length() != model.config().window) {
    throw ShapeError("dataset window length differs from the model's");
  }
  std::vector<Prediction> out;
  for (std::size_t k : data.indices(split)) out.push_back(model.predict(data.window(k)));
  return out;
}

std::vector<double> targets_of(const WindowedDataset& data, Split split) {
  std::vector<double> out;
  for (std::size_t k : data.indices(split)) out.push_back(data[k].target);
  return out;
}

double sum_squared_error(const Model& model, const WindowedDataset& data, Split split) {
  auto idx = data.indices(split);
  if (idx.empty()) throw ValidationError(std::string(split_name(split)) + " split is empty");
  double s = 0.0;
  for (std::size_t k : idx) {
    double d = data[k].target - model.predict(data.window(k)).raw;
    s += d * d;
  }
  return s;
}

TrainedModel fit(Model model, const WindowedDataset& data, const FitOptions& options) {
  const ModelConfig cfg = model.config();
  if (data.count(Split::Train) == 0) throw ValidationError("fit needs a nonempty train split");
  const std::size_t n_val = data.count(Split::Val);
  if (n_val == 0) throw ValidationError("fit needs a nonempty validation split");

  nn::AdamState adam;
  nn::EarlyStopping monitor(cfg.patience, cfg.min_delta);
  std::vector<nn::Tensor> best = model.network().snapshot();
  TrainedModel result{model, {}, 0, false};

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = nn::lr_at_epoch(cfg.lr0, epoch);
    rec.train_loss = train_epoch(model, adam, data, epoch, options.train);
    rec.val_loss = sum_squared_error(model, data, Split::Val);
    rec.val_mse = rec.val_loss / static_cast<double>(n_val);
    result.history.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);

    auto decision = monitor.update(rec.val_loss);
    if (decision.improved) best = model.network().snapshot();
    if (cfg.early_stopping && decision.stop) {
      result.stopped_early = true;
      break;
    }
  }
  result.best_epoch = monitor.best_epoch();
  model.network().restore(best);
  result.model = std::move(model);
  return result;
}

}  // namespace fdr
