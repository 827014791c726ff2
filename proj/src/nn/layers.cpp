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

#include "fdr/nn/layers.hpp"

#include <cmath>

#include "fdr/error.hpp"
#include "fdr/util.hpp"

namespace fdr::nn {

void require_shape(const Tensor& t, Shape expected, const char* where) {
  if (t.rows() != expected.steps || t.cols() != expected.features) {
    throw ShapeError(std::string(where) + ": expected " + expected.str() + ", got " + shape_of(t).str());
  }
}

void check_finite([[maybe_unused]] const Tensor& t, [[maybe_unused]] const char* where) {
#ifndef NDEBUG
  if (!t.allFinite()) throw ValidationError(std::string(where) + ": non-finite value");
#endif
}

const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::Conv1D: return "conv1d";
    case LayerKind::MaxPool1D: return "maxpool1d";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::Dense: return "dense";
    case LayerKind::Lstm: return "lstm";
    case LayerKind::BiLstm: return "bilstm";
  }
  return "?";
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::Linear: return "linear";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
  }
  return "?";
}

LayerKind layer_kind_from(const std::string& s) {
  for (auto k : {LayerKind::Conv1D, LayerKind::MaxPool1D, LayerKind::Flatten, LayerKind::Dense, LayerKind::Lstm,
                 LayerKind::BiLstm}) {
    if (s == to_string(k)) return k;
  }
  throw ValidationError("unknown layer kind '" + s + "'");
}

Activation activation_from(const std::string& s) {
  for (auto a : {Activation::Linear, Activation::Relu, Activation::Tanh}) {
    if (s == to_string(a)) return a;
  }
  throw ValidationError("unknown activation '" + s + "'");
}

LayerSpec LayerSpec::conv1d(Index filters, Index kernel, Activation act) {
  return {LayerKind::Conv1D, filters, kernel, 0, act, false};
}
LayerSpec LayerSpec::maxpool1d(Index pool) { return {LayerKind::MaxPool1D, 0, 0, pool, Activation::Linear, false}; }
LayerSpec LayerSpec::flatten() { return {LayerKind::Flatten, 0, 0, 0, Activation::Linear, false}; }
LayerSpec LayerSpec::dense(Index units, Activation act) { return {LayerKind::Dense, units, 0, 0, act, false}; }
LayerSpec LayerSpec::lstm(Index units, bool seq) { return {LayerKind::Lstm, units, 0, 0, Activation::Tanh, seq}; }
LayerSpec LayerSpec::bilstm(Index units, bool seq) {
  return {LayerKind::BiLstm, units, 0, 0, Activation::Tanh, seq};
}

std::unique_ptr<Layer> make_layer(const LayerSpec& s, Shape in) {
  switch (s.kind) {
    case LayerKind::Conv1D: return std::make_unique<Conv1D>(in, s.units, s.kernel_size, s.activation);
    case LayerKind::MaxPool1D: return std::make_unique<MaxPool1D>(in, s.pool_size);
    case LayerKind::Flatten: return std::make_unique<Flatten>(in);
    case LayerKind::Dense: return std::make_unique<Dense>(in, s.units, s.activation);
    case LayerKind::Lstm: return std::make_unique<Lstm>(in, s.units, s.return_sequences);
    case LayerKind::BiLstm: return std::make_unique<BiLstm>(in, s.units, s.return_sequences);
  }
  throw ValidationError("unknown layer kind");
}

namespace {

void apply_activation(Tensor& z, Activation act) {
  switch (act) {
    case Activation::Linear: break;
    case Activation::Relu: z = z.cwiseMax(0.0); break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
  }
}

// dL/dz from dL/dy given the activated output y.
Tensor activation_backward(const Tensor& dy, const Tensor& y, Activation act) {
  switch (act) {
    case Activation::Linear: return dy;
    case Activation::Relu: return (y.array() > 0.0).select(dy, 0.0);
    case Activation::Tanh: return (dy.array() * (1.0 - y.array().square())).matrix();
  }
  return dy;
}

void require_positive(Index v, const char* what) {
  if (v <= 0) throw ValidationError(std::string(what) + " must be positive");
}

}  // namespace

void glorot_uniform(Tensor& w, Index fan_in, Index fan_out, std::mt19937_64& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Index r = 0; r < w.rows(); ++r) {
    for (Index c = 0; c < w.cols(); ++c) w(r, c) = (2.0 * unit_interval(rng()) - 1.0) * limit;
  }
}

void orthogonal_blocks(Tensor& w, std::mt19937_64& rng) {
  const Index u = w.rows();
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index g = 0; g < w.cols() / u; ++g) {
    Tensor a(u, u);
    for (Index r = 0; r < u; ++r) {
      for (Index c = 0; c < u; ++c) a(r, c) = normal(rng);
    }
    Eigen::HouseholderQR<Tensor> qr(a);
    Tensor q = qr.householderQ() * Tensor::Identity(u, u);
    // Sign fix so the distribution is uniform over orthogonal matrices.
    Eigen::VectorXd d = qr.matrixQR().diagonal();
    for (Index c = 0; c < u; ++c) {
      if (d(c) < 0) q.col(c) *= -1.0;
    }
    w.block(0, g * u, u, u) = q;
  }
}

// --- Conv1D --------------------------------------------------------------------

Conv1D::Conv1D(Shape input, Index filters, Index kernel, Activation act)
    : in_(input), filters_(filters), kernel_(kernel), act_(act) {
  require_positive(filters, "conv1d filters");
  require_positive(kernel, "conv1d kernel_size");
  if (in_.steps < kernel_) {
    throw ShapeError("conv1d: sequence length " + std::to_string(in_.steps) + " shorter than kernel " +
                     std::to_string(kernel_));
  }
  params_ = {{"kernel", Tensor::Zero(kernel_ * in_.features, filters_)}, {"bias", Tensor::Zero(1, filters_)}};
}

LayerSpec Conv1D::spec() const { return LayerSpec::conv1d(filters_, kernel_, act_); }

void Conv1D::initialize(std::mt19937_64& rng) {
  glorot_uniform(params_[0].value, kernel_ * in_.features, kernel_ * filters_, rng);
  params_[1].value.setZero();
}

Tensor Conv1D::im2col(const Tensor& x) const {
  const Index out_steps = in_.steps - kernel_ + 1;
  const Index c = in_.features;
  Tensor cols(out_steps, kernel_ * c);
  for (Index j = 0; j < kernel_; ++j) cols.middleCols(j * c, c) = x.middleRows(j, out_steps);
  return cols;
}

Tensor Conv1D::forward(const Tensor& x, LayerCache* cache) const {
  require_shape(x, in_, "conv1d");
  Tensor cols = im2col(x);
  Tensor y = cols * params_[0].value;
  y.rowwise() += params_[1].value.row(0);
  apply_activation(y, act_);
  check_finite(y, "conv1d");
  if (cache) cache->slots = {std::move(cols), y};
  return y;
}

Tensor Conv1D::backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const {
  const Tensor& cols = cache.slots[0];
  Tensor dz = activation_backward(dy, cache.slots[1], act_);
  grads[0].noalias() += cols.transpose() * dz;
  grads[1] += dz.colwise().sum();
  Tensor dcols = dz * params_[0].value.transpose();
  const Index out_steps = in_.steps - kernel_ + 1;
  const Index c = in_.features;
  Tensor dx = Tensor::Zero(in_.steps, c);
  for (Index j = 0; j < kernel_; ++j) dx.middleRows(j, out_steps) += dcols.middleCols(j * c, c);
  return dx;
}

// --- MaxPool1D -----------------------------------------------------------------

MaxPool1D::MaxPool1D(Shape input, Index pool) : in_(input), pool_(pool) {
  require_positive(pool, "maxpool1d pool_size");
  if (in_.steps < pool_) {
    throw ShapeError("maxpool1d: sequence length " + std::to_string(in_.steps) + " shorter than pool " +
                     std::to_string(pool_));
  }
}

Tensor MaxPool1D::forward(const Tensor& x, LayerCache* cache) const {
  require_shape(x, in_, "maxpool1d");
  const Shape out = output_shape();
  Tensor y(out.steps, out.features);
  Tensor argmax(out.steps, out.features);
  for (Index t = 0; t < out.steps; ++t) {
    for (Index f = 0; f < out.features; ++f) {
      Index best = t * pool_;
      for (Index k = 1; k < pool_; ++k) {
        if (x(t * pool_ + k, f) > x(best, f)) best = t * pool_ + k;
      }
      y(t, f) = x(best, f);
      argmax(t, f) = static_cast<double>(best);
    }
  }
  if (cache) cache->slots = {std::move(argmax)};
  return y;
}

Tensor MaxPool1D::backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor>) const {
  const Tensor& argmax = cache.slots[0];
  Tensor dx = Tensor::Zero(in_.steps, in_.features);
  for (Index t = 0; t < dy.rows(); ++t) {
    for (Index f = 0; f < dy.cols(); ++f) dx(static_cast<Index>(argmax(t, f)), f) += dy(t, f);
  }
  return dx;
}

// --- Flatten -------------------------------------------------------------------

Tensor Flatten::forward(const Tensor& x, LayerCache*) const {
  require_shape(x, in_, "flatten");
  Tensor y(1, in_.numel());
  for (Index t = 0; t < in_.steps; ++t) y.block(0, t * in_.features, 1, in_.features) = x.row(t);
  return y;
}

Tensor Flatten::backward(const Tensor& dy, const LayerCache&, std::span<Tensor>) const {
  Tensor dx(in_.steps, in_.features);
  for (Index t = 0; t < in_.steps; ++t) dx.row(t) = dy.block(0, t * in_.features, 1, in_.features);
  return dx;
}

// --- Dense ---------------------------------------------------------------------

Dense::Dense(Shape input, Index units, Activation act) : in_(input), units_(units), act_(act) {
  require_positive(units, "dense units");
  if (in_.steps != 1) throw ShapeError("dense expects a vector input, got " + in_.str() + " (missing flatten?)");
  params_ = {{"kernel", Tensor::Zero(in_.features, units_)}, {"bias", Tensor::Zero(1, units_)}};
}

void Dense::initialize(std::mt19937_64& rng) {
  glorot_uniform(params_[0].value, in_.features, units_, rng);
  params_[1].value.setZero();
}

Tensor Dense::forward(const Tensor& x, LayerCache* cache) const {
  require_shape(x, in_, "dense");
  Tensor y = x * params_[0].value + params_[1].value;
  apply_activation(y, act_);
  check_finite(y, "dense");
  if (cache) cache->slots = {x, y};
  return y;
}

Tensor Dense::backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const {
  Tensor dz = activation_backward(dy, cache.slots[1], act_);
  grads[0].noalias() += cache.slots[0].transpose() * dz;
  grads[1] += dz;
  return dz * params_[0].value.transpose();
}

}  // namespace fdr::nn
