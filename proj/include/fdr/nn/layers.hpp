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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fdr/nn/tensor.hpp"

namespace fdr::nn {

enum class LayerKind : std::uint8_t { Conv1D, MaxPool1D, Flatten, Dense, Lstm, BiLstm };
enum class Activation : std::uint8_t { Linear, Relu, Tanh };

const char* to_string(LayerKind k);
const char* to_string(Activation a);
LayerKind layer_kind_from(const std::string& s);
Activation activation_from(const std::string& s);

/// Declarative description of one layer; enough to rebuild it.
struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  Index units = 0;        ///< filters (conv1d) or units (dense, lstm, bilstm)
  Index kernel_size = 0;  ///< conv1d
  Index pool_size = 0;    ///< maxpool1d
  Activation activation = Activation::Linear;
  bool return_sequences = false;  ///< lstm/bilstm: emit every step instead of the last

  static LayerSpec conv1d(Index filters, Index kernel, Activation act = Activation::Relu);
  static LayerSpec maxpool1d(Index pool);
  static LayerSpec flatten();
  static LayerSpec dense(Index units, Activation act);
  static LayerSpec lstm(Index units, bool return_sequences = false);
  static LayerSpec bilstm(Index units, bool return_sequences = false);

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Per-call scratch recorded by forward() and consumed by backward().
struct LayerCache {
  std::vector<Tensor> slots;
};

/// A named trainable tensor.
struct Parameter {
  std::string name;
  Tensor value;
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerSpec spec() const = 0;
  virtual Shape input_shape() const = 0;
  virtual Shape output_shape() const = 0;

  /// Pure with respect to the layer; `cache` may be null for inference.
  virtual Tensor forward(const Tensor& x, LayerCache* cache) const = 0;

  /// Accumulates parameter gradients into `grads` (one per parameter, same
  /// order as params()) and returns dL/dx.
  virtual Tensor backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const = 0;

  virtual std::span<Parameter> params() { return {}; }
  virtual std::span<const Parameter> params() const { return {}; }

  /// Re-draws parameters with the conventional initializers.
  virtual void initialize(std::mt19937_64&) {}

  virtual std::unique_ptr<Layer> clone() const = 0;
};

/// Builds a layer of `spec` for the given input shape. Throws ShapeError when
/// the input does not fit (e.g. conv kernel longer than the sequence).
std::unique_ptr<Layer> make_layer(const LayerSpec& spec, Shape input);

// Concrete layers are exposed for direct testing.

/// Valid-padding, stride-1 1-D convolution.
/// out[t,f] = act(sum_{j<k, c} w[f](j,c) * in[t+j, c] + b[f]).
/// Weight tensor is (k*C) x F, row index j*C + c.
class Conv1D final : public Layer {
 public:
  Conv1D(Shape input, Index filters, Index kernel, Activation act);
  LayerSpec spec() const override;
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {in_.steps - kernel_ + 1, filters_}; }
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const override;
  std::span<Parameter> params() override { return params_; }
  std::span<const Parameter> params() const override { return params_; }
  void initialize(std::mt19937_64& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv1D>(*this); }

 private:
  Tensor im2col(const Tensor& x) const;
  Shape in_;
  Index filters_, kernel_;
  Activation act_;
  std::vector<Parameter> params_;  // kernel, bias
};

/// Non-overlapping max pooling over time; trailing partial window dropped.
/// Gradient goes to the first maximal element of each window.
class MaxPool1D final : public Layer {
 public:
  MaxPool1D(Shape input, Index pool);
  LayerSpec spec() const override { return LayerSpec::maxpool1d(pool_); }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {in_.steps / pool_, in_.features}; }
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool1D>(*this); }

 private:
  Shape in_;
  Index pool_;
};

/// (T, F) -> (1, T*F), row-major (index t*F + f).
class Flatten final : public Layer {
 public:
  explicit Flatten(Shape input) : in_(input) {}
  LayerSpec spec() const override { return LayerSpec::flatten(); }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {1, in_.numel()}; }
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }

 private:
  Shape in_;
};

/// y = act(x W + b) on a 1 x in vector; W is in x units.
class Dense final : public Layer {
 public:
  Dense(Shape input, Index units, Activation act);
  LayerSpec spec() const override { return LayerSpec::dense(units_, act_); }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {1, units_}; }
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const override;
  std::span<Parameter> params() override { return params_; }
  std::span<const Parameter> params() const override { return params_; }
  void initialize(std::mt19937_64& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

 private:
  Shape in_;
  Index units_;
  Activation act_;
  std::vector<Parameter> params_;  // kernel, bias
};

/// Parameters of one recurrent direction. Gate blocks along the 4U axis are
/// ordered input, forget, candidate, output.
struct LstmWeights {
  Tensor kernel;     ///< F x 4U
  Tensor recurrent;  ///< U x 4U
  Tensor bias;       ///< 1 x 4U
};

/// Single-direction LSTM recurrence from zero state:
///   z_t = x_t W + h_{t-1} R + b
///   i,f,o = sigmoid(z), g = tanh(z)
///   c_t = f*c_{t-1} + i*g, h_t = o*tanh(c_t)
/// Returns H as (T+1) x U with row 0 the zero initial state. When `cache` is
/// non-null it receives [X, gates(T x 4U), C((T+1) x U), H].
Tensor lstm_sequence(const Tensor& x, const Tensor& kernel, const Tensor& recurrent, const Tensor& bias,
                     LayerCache* cache);

/// BPTT through lstm_sequence. `dh` is T x U (gradient w.r.t. h_1..h_T);
/// `cache` holds the four slots recorded by the forward call.
/// Accumulates into dkernel/drecurrent/dbias and returns dL/dx (T x F).
Tensor lstm_sequence_backward(const Tensor& dh, std::span<const Tensor> cache, const Tensor& kernel,
                              const Tensor& recurrent, Tensor& dkernel, Tensor& drecurrent, Tensor& dbias);

class Lstm final : public Layer {
 public:
  Lstm(Shape input, Index units, bool return_sequences);
  LayerSpec spec() const override { return LayerSpec::lstm(units_, return_sequences_); }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {return_sequences_ ? in_.steps : 1, units_}; }
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const override;
  std::span<Parameter> params() override { return params_; }
  std::span<const Parameter> params() const override { return params_; }
  void initialize(std::mt19937_64& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Lstm>(*this); }

 private:
  Shape in_;
  Index units_;
  bool return_sequences_;
  std::vector<Parameter> params_;  // kernel, recurrent, bias
};

/// Forward LSTM over x and an independent LSTM over reversed x. Outputs are
/// concatenated forward || backward; with return_sequences the backward
/// states are re-aligned to the original time index.
class BiLstm final : public Layer {
 public:
  BiLstm(Shape input, Index units, bool return_sequences);
  LayerSpec spec() const override { return LayerSpec::bilstm(units_, return_sequences_); }
  Shape input_shape() const override { return in_; }
  Shape output_shape() const override { return {return_sequences_ ? in_.steps : 1, 2 * units_}; }
  Tensor forward(const Tensor& x, LayerCache* cache) const override;
  Tensor backward(const Tensor& dy, const LayerCache& cache, std::span<Tensor> grads) const override;
  std::span<Parameter> params() override { return params_; }
  std::span<const Parameter> params() const override { return params_; }
  void initialize(std::mt19937_64& rng) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<BiLstm>(*this); }

 private:
  Shape in_;
  Index units_;
  bool return_sequences_;
  // forward kernel/recurrent/bias, then backward kernel/recurrent/bias
  std::vector<Parameter> params_;
};

// Initializers.
void glorot_uniform(Tensor& w, Index fan_in, Index fan_out, std::mt19937_64& rng);
/// Orthogonal U x 4U recurrent kernel, one orthogonal U x U block per gate.
void orthogonal_blocks(Tensor& w, std::mt19937_64& rng);

}  // namespace fdr::nn
