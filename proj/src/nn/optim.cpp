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

#include "fdr/nn/optim.hpp"

#include <cmath>

#include "fdr/error.hpp"

namespace fdr::nn {

namespace {

void check_pair(std::span<const double> p, std::span<const double> t) {
  if (p.empty()) throw ValidationError("loss of an empty batch");
  if (p.size() != t.size()) throw ShapeError("prediction and target counts differ");
}

}  // namespace

double sse_loss(std::span<const double> predictions, std::span<const double> targets) {
  check_pair(predictions, targets);
  double s = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double d = predictions[i] - targets[i];
    s += d * d;
  }
  return s;
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
  return sse_loss(predictions, targets) / static_cast<double>(predictions.size());
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state, double lr) {
  if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
  if (params.size() != grads.size()) throw ShapeError("adam: parameter and gradient counts differ");
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.push_back(Tensor::Zero(p->rows(), p->cols()));
      state.v.push_back(Tensor::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) throw ShapeError("adam: state does not match parameters");

  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& g = grads[i];
    require_shape(g, shape_of(*params[i]), "adam gradient");
    check_finite(g, "adam gradient");
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g.cwiseAbs2();
    params[i]->array() -=
        lr * (state.m[i].array() / correction1) / ((state.v[i].array() / correction2).sqrt() + c.epsilon);
  }
}

double lr_at_epoch(double lr0, std::size_t epoch) {
  if (epoch < 1) throw ValidationError("epochs are counted from 1");
  return std::ldexp(lr0, -static_cast<int>(epoch - 1));
}

EarlyStopping::Decision EarlyStopping::update(double val_loss) {
  if (!std::isfinite(val_loss)) throw ValidationError("validation loss is not finite");
  ++epoch_;
  if (epoch_ == 1 || val_loss < best_ - min_delta_) {
    best_ = val_loss;
    best_epoch_ = epoch_;
    wait_ = 0;
    return {false, true, best_epoch_};
  }
  ++wait_;
  return {wait_ >= patience_, false, best_epoch_};
}

}  // namespace fdr::nn
