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
#include <optional>
#include <span>
#include <vector>

#include "fdr/nn/tensor.hpp"

namespace fdr::nn {

/// Mean of squared differences.
double mse_loss(std::span<const double> predictions, std::span<const double> targets);
/// Sum of squared differences (n * mse_loss).
double sse_loss(std::span<const double> predictions, std::span<const double> targets);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config{};
  std::uint64_t step = 0;
  std::vector<Tensor> m;  ///< first moments, shaped like the parameters
  std::vector<Tensor> v;  ///< second moments
};

/// One bias-corrected Adam update: p -= lr * m_hat / (sqrt(v_hat) + eps).
/// Moments are allocated on the first call.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state, double lr);

/// Halving schedule: lr0 * 2^-(epoch-1), epochs counted from 1.
double lr_at_epoch(double lr0, std::size_t epoch);

/// Patience-based early stopping on a validation loss. An epoch improves when
/// its loss is below best - min_delta; after `patience` consecutive
/// non-improving epochs the monitor says stop.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience = 3, double min_delta = 0.0)
      : patience_(patience), min_delta_(min_delta) {}

  struct Decision {
    bool stop = false;
    bool improved = false;
    std::size_t best_epoch = 0;
  };

  /// Feed epochs in order starting at 1.
  Decision update(double val_loss);

  std::size_t best_epoch() const noexcept { return best_epoch_; }
  double best_loss() const noexcept { return best_; }

 private:
  std::size_t patience_;
  double min_delta_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t wait_ = 0;
  double best_ = 0.0;
};

}  // namespace fdr::nn
