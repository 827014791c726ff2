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

#include <cmath>

#include "fdr/error.hpp"
#include "fdr/nn/layers.hpp"

namespace fdr::nn {
namespace {

using Row = Eigen::RowVectorXd;

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

enum Slot { kX = 0, kGates = 1, kCell = 2, kHidden = 3 };

Tensor reversed_rows(const Tensor& x) { return x.colwise().reverse(); }

void init_direction(std::span<Parameter> p, Index features, Index units, std::mt19937_64& rng) {
  glorot_uniform(p[0].value, features, 4 * units, rng);
  orthogonal_blocks(p[1].value, rng);
  p[2].value.setZero();
  p[2].value.block(0, units, 1, units).setOnes();  // forget-gate bias
}

std::vector<Parameter> direction_params(const std::string& prefix, Index features, Index units) {
  return {{prefix + "kernel", Tensor::Zero(features, 4 * units)},
          {prefix + "recurrent", Tensor::Zero(units, 4 * units)},
          {prefix + "bias", Tensor::Zero(1, 4 * units)}};
}

}  // namespace

Tensor lstm_sequence(const Tensor& x, const Tensor& kernel, const Tensor& recurrent, const Tensor& bias,
                     LayerCache* cache) {
  const Index steps = x.rows();
  const Index u = recurrent.rows();
  Tensor xw = x * kernel;
  xw.rowwise() += bias.row(0);

  Tensor gates(steps, 4 * u);
  Tensor cell = Tensor::Zero(steps + 1, u);
  Tensor hidden = Tensor::Zero(steps + 1, u);
  Row z(4 * u);
  for (Index t = 0; t < steps; ++t) {
    z.noalias() = xw.row(t) + hidden.row(t) * recurrent;
    for (Index k = 0; k < u; ++k) {
      double i = sigmoid(z(k));
      double f = sigmoid(z(u + k));
      double g = std::tanh(z(2 * u + k));
      double o = sigmoid(z(3 * u + k));
      double c = f * cell(t, k) + i * g;
      cell(t + 1, k) = c;
      hidden(t + 1, k) = o * std::tanh(c);
      gates(t, k) = i;
      gates(t, u + k) = f;
      gates(t, 2 * u + k) = g;
      gates(t, 3 * u + k) = o;
    }
  }
  if (cache) cache->slots = {x, std::move(gates), std::move(cell), hidden};
  return hidden;
}

Tensor lstm_sequence_backward(const Tensor& dh, std::span<const Tensor> cache, const Tensor& kernel,
                              const Tensor& recurrent, Tensor& dkernel, Tensor& drecurrent, Tensor& dbias) {
  const Tensor& x = cache[kX];
  const Tensor& gates = cache[kGates];
  const Tensor& cell = cache[kCell];
  const Tensor& hidden = cache[kHidden];
  const Index steps = x.rows();
  const Index u = recurrent.rows();

  Tensor dz(steps, 4 * u);
  Row dh_next = Row::Zero(u);
  Row dc_next = Row::Zero(u);
  for (Index t = steps - 1; t >= 0; --t) {
    for (Index k = 0; k < u; ++k) {
      double i = gates(t, k), f = gates(t, u + k), g = gates(t, 2 * u + k), o = gates(t, 3 * u + k);
      double tc = std::tanh(cell(t + 1, k));
      double dht = dh(t, k) + dh_next(k);
      double dct = dc_next(k) + dht * o * (1.0 - tc * tc);
      dz(t, k) = dct * g * i * (1.0 - i);
      dz(t, u + k) = dct * cell(t, k) * f * (1.0 - f);
      dz(t, 2 * u + k) = dct * i * (1.0 - g * g);
      dz(t, 3 * u + k) = dht * tc * o * (1.0 - o);
      dc_next(k) = dct * f;
    }
    dh_next.noalias() = dz.row(t) * recurrent.transpose();
  }
  dkernel.noalias() += x.transpose() * dz;
  drecurrent.noalias() += hidden.topRows(steps).transpose() * dz;
  dbias += dz.colwise().sum();
  return dz * kernel.transpose();
}

// --- Lstm ----------------------------------------------------------------------

Lstm::Lstm(Shape input, Index units, bool return_sequences)
    : in_(input), units_(units), return_sequences_(return_sequences) {
  if (units <= 0) throw ValidationError("lstm units must be positive");
  if (in_.steps <= 0 || in_.features <= 0) throw ShapeError("lstm input must be nonempty");
  params_ = direction_params("", in_.features, units_);
}

void Lstm::initialize(std::mt19937_64& rng) { init_direction(params_, in_.features, units_, rng); }

Tensor Lstm::forward(const Tensor& x, LayerCache* cache) const {
  require_shape(x, in_, "lstm");
  Tensor h = lstm_sequence(x, params_[0].value, params_[1].value, params_[2].value, cache);
  check_finite(h, "lstm");
  if (return_sequences_) return h.bottomRows(in_.steps);
  return h.bottomRows(1);
}

Tensor Lstm::backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const {
  Tensor dh = Tensor::Zero(in_.steps, units_);
  if (return_sequences_) {
    dh = dy;
  } else {
    dh.bottomRows(1) = dy;
  }
  return lstm_sequence_backward(dh, cache.slots, params_[0].value, params_[1].value, grads[0], grads[1], grads[2]);
}

// --- BiLstm --------------------------------------------------------------------

BiLstm::BiLstm(Shape input, Index units, bool return_sequences)
    : in_(input), units_(units), return_sequences_(return_sequences) {
  if (units <= 0) throw ValidationError("bilstm units must be positive");
  if (in_.steps <= 0 || in_.features <= 0) throw ShapeError("bilstm input must be nonempty");
  params_ = direction_params("forward_", in_.features, units_);
  auto back = direction_params("backward_", in_.features, units_);
  params_.insert(params_.end(), back.begin(), back.end());
}

void BiLstm::initialize(std::mt19937_64& rng) {
  init_direction(std::span(params_).subspan(0, 3), in_.features, units_, rng);
  init_direction(std::span(params_).subspan(3, 3), in_.features, units_, rng);
}

// Cache layout: forward-direction slots [0,4), backward-direction slots [4,8).
Tensor BiLstm::forward(const Tensor& x, LayerCache* cache) const {
  require_shape(x, in_, "bilstm");
  LayerCache fwd, bwd;
  Tensor hf = lstm_sequence(x, params_[0].value, params_[1].value, params_[2].value, cache ? &fwd : nullptr);
  Tensor hb = lstm_sequence(reversed_rows(x), params_[3].value, params_[4].value, params_[5].value,
                            cache ? &bwd : nullptr);
  const Index steps = in_.steps;
  Tensor y;
  if (return_sequences_) {
    y.resize(steps, 2 * units_);
    y.leftCols(units_) = hf.bottomRows(steps);
    // Backward step s saw original time T-1-s.
    y.rightCols(units_) = hb.bottomRows(steps).colwise().reverse();
  } else {
    y.resize(1, 2 * units_);
    y.leftCols(units_) = hf.bottomRows(1);
    y.rightCols(units_) = hb.bottomRows(1);
  }
  check_finite(y, "bilstm");
  if (cache) {
    cache->slots = std::move(fwd.slots);
    for (auto& s : bwd.slots) cache->slots.push_back(std::move(s));
  }
  return y;
}

Tensor BiLstm::backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const {
  const Index steps = in_.steps;
  Tensor dhf = Tensor::Zero(steps, units_);
  Tensor dhb = Tensor::Zero(steps, units_);
  if (return_sequences_) {
    dhf = dy.leftCols(units_);
    dhb = dy.rightCols(units_).colwise().reverse();
  } else {
    dhf.bottomRows(1) = dy.leftCols(units_);
    dhb.bottomRows(1) = dy.rightCols(units_);
  }
  std::span<const Tensor> slots(cache.slots);
  Tensor dx = lstm_sequence_backward(dhf, slots.first(4), params_[0].value, params_[1].value, grads[0], grads[1], grads[2]);
  Tensor dxr = lstm_sequence_backward(dhb, slots.subspan(4), params_[3].value, params_[4].value, grads[3], grads[4], grads[5]);
  dx += reversed_rows(dxr);
  return dx;
}

}  // namespace fdr::nn
