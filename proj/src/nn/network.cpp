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

#include "fdr/nn/network.hpp"

#include <random>

#include "fdr/error.hpp"

namespace fdr::nn {

Network::Network(Shape input, const std::vector<LayerSpec>& specs) : input_(input) {
  if (input.steps <= 0 || input.features <= 0) throw ShapeError("network input must be nonempty");
  if (specs.empty()) throw ValidationError("network needs at least one layer");
  Shape cur = input;
  for (const auto& s : specs) {
    layers_.push_back(make_layer(s, cur));
    cur = layers_.back()->output_shape();
    if (cur.steps <= 0 || cur.features <= 0) throw ShapeError("layer produces an empty output");
  }
}

Network::Network(const Network& other) : input_(other.input_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

Shape Network::output_shape() const { return layers_.back()->output_shape(); }

std::vector<LayerSpec> Network::specs() const {
  std::vector<LayerSpec> out;
  for (const auto& l : layers_) out.push_back(l->spec());
  return out;
}

void Network::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& l : layers_) l->initialize(rng);
}

Tensor Network::forward(const Tensor& x) const {
  require_shape(x, input_, "network input");
  Tensor cur = x;
  for (const auto& l : layers_) cur = l->forward(cur, nullptr);
  return cur;
}

Tensor Network::forward(const Tensor& x, Workspace& ws) const {
  require_shape(x, input_, "network input");
  ws.caches.resize(layers_.size());
  Tensor cur = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) cur = layers_[i]->forward(cur, &ws.caches[i]);
  return cur;
}

Tensor Network::backward(const Tensor& dy, const Workspace& ws, Gradients& grads) const {
  std::size_t offset = grads.size();
  Tensor cur = dy;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    std::size_t n = layers_[i]->params().size();
    offset -= n;
    cur = layers_[i]->backward(cur, ws.caches[i], std::span<Tensor>(grads).subspan(offset, n));
  }
  return cur;
}

std::vector<Tensor*> Network::parameters() {
  std::vector<Tensor*> out;
  for (auto& l : layers_) {
    for (auto& p : l->params()) out.push_back(&p.value);
  }
  return out;
}

std::vector<const Tensor*> Network::parameters() const {
  std::vector<const Tensor*> out;
  for (const auto& l : layers_) {
    for (const auto& p : std::as_const(*l).params()) out.push_back(&p.value);
  }
  return out;
}

std::vector<std::string> Network::parameter_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = *layers_[i];
    for (const auto& p : l.params()) out.push_back(std::to_string(i) + "." + to_string(l.spec().kind) + "." + p.name);
  }
  return out;
}

Gradients Network::zero_gradients() const {
  Gradients g;
  for (const Tensor* p : parameters()) g.push_back(Tensor::Zero(p->rows(), p->cols()));
  return g;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor* p : parameters()) n += static_cast<std::size_t>(p->size());
  return n;
}

std::vector<Tensor> Network::snapshot() const {
  std::vector<Tensor> out;
  for (const Tensor* p : parameters()) out.push_back(*p);
  return out;
}

void Network::restore(const std::vector<Tensor>& values) {
  auto ps = parameters();
  if (values.size() != ps.size()) throw ShapeError("parameter snapshot has the wrong number of tensors");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    require_shape(values[i], shape_of(*ps[i]), "parameter restore");
    *ps[i] = values[i];
  }
}

}  // namespace fdr::nn
