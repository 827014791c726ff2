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
#include <memory>
#include <vector>

#include "fdr/nn/layers.hpp"

namespace fdr::nn {

/// Per-call activations of every layer, filled by a training forward pass.
struct Workspace {
  std::vector<LayerCache> caches;
};

/// Gradients in the same order as Network::parameters().
using Gradients = std::vector<Tensor>;

/// Feed-forward stack of layers with a fixed input shape.
class Network {
 public:
  Network(Shape input, const std::vector<LayerSpec>& specs);
  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;
  ~Network() = default;

  Shape input_shape() const noexcept { return input_; }
  Shape output_shape() const;
  std::vector<LayerSpec> specs() const;
  std::size_t layer_count() const noexcept { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  /// Deterministic initialization from `seed`.
  void initialize(std::uint64_t seed);

  /// Inference; safe to call concurrently on a shared const Network.
  Tensor forward(const Tensor& x) const;
  /// Training forward pass; records activations into `ws`.
  Tensor forward(const Tensor& x, Workspace& ws) const;
  /// Accumulates into `grads` and returns dL/dx.
  Tensor backward(const Tensor& dy, const Workspace& ws, Gradients& grads) const;

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  /// Fully qualified names, e.g. "2.dense.kernel".
  std::vector<std::string> parameter_names() const;
  Gradients zero_gradients() const;
  std::size_t parameter_count() const;

  std::vector<Tensor> snapshot() const;
  void restore(const std::vector<Tensor>& values);

 private:
  Shape input_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

}  // namespace fdr::nn
