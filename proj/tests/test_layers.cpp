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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fdr/error.hpp"
#include "fdr/nn/layers.hpp"
#include "fdr/nn/network.hpp"
#include "gradcheck.hpp"

namespace fdr::nn {
namespace {

Tensor column(std::initializer_list<double> v) {
  Tensor t(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) t(i++, 0) = x;
  return t;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

TEST(Conv1D, IdentityKernelWithRelu) {
  Conv1D conv({2, 1}, 1, 1, Activation::Relu);
  conv.params()[0].value.setConstant(1.0);
  conv.params()[1].value.setZero();
  Tensor y = conv.forward(column({-1.0, 2.0}), nullptr);
  EXPECT_EQ(y(0, 0), 0.0);
  EXPECT_EQ(y(1, 0), 2.0);
}

TEST(Conv1D, HandConvolution) {
  Conv1D conv({4, 1}, 1, 2, Activation::Linear);
  conv.params()[0].value.setConstant(1.0);
  conv.params()[1].value.setZero();
  Tensor y = conv.forward(column({1, 0, 1, 1}), nullptr);
  ASSERT_EQ(y.rows(), 3);
  EXPECT_EQ(y(0, 0), 1.0);
  EXPECT_EQ(y(1, 0), 1.0);
  EXPECT_EQ(y(2, 0), 2.0);
}

TEST(Conv1D, KernelLongerThanInput) {
  EXPECT_THROW(make_layer(LayerSpec::conv1d(4, 5), {3, 1}), ShapeError);
}

TEST(MaxPool1D, Example) {
  MaxPool1D pool({4, 1}, 2);
  Tensor y = pool.forward(column({3, 1, 4, 1}), nullptr);
  ASSERT_EQ(y.rows(), 2);
  EXPECT_EQ(y(0, 0), 3.0);
  EXPECT_EQ(y(1, 0), 4.0);
}

TEST(MaxPool1D, TieRoutesGradientToFirstMax) {
  MaxPool1D pool({4, 1}, 2);
  LayerCache cache;
  pool.forward(column({2, 2, 5, 5}), &cache);
  Tensor dx = pool.backward(column({1.0, 1.0}), cache, {});
  EXPECT_EQ(dx(0, 0), 1.0);
  EXPECT_EQ(dx(1, 0), 0.0);
  EXPECT_EQ(dx(2, 0), 1.0);
  EXPECT_EQ(dx(3, 0), 0.0);
}

TEST(Flatten, RowMajorOrder) {
  Flatten flat({2, 3});
  Tensor x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  Tensor y = flat.forward(x, nullptr);
  ASSERT_EQ(y.cols(), 6);
  for (Index i = 0; i < 6; ++i) EXPECT_EQ(y(0, i), static_cast<double>(i + 1));
}

TEST(Dense, IdentityWeights) {
  Dense dense({1, 3}, 3, Activation::Linear);
  dense.params()[0].value = Tensor::Identity(3, 3);
  dense.params()[1].value.setZero();
  Tensor x(1, 3);
  x << 0.3, -2.0, 7.5;
  EXPECT_EQ(dense.forward(x, nullptr), x);
}

TEST(Dense, HandArithmeticWithRelu) {
  Dense dense({1, 2}, 1, Activation::Relu);
  dense.params()[0].value = column({1.0, -1.0});
  dense.params()[1].value.setConstant(0.5);
  Tensor x(1, 2);
  x << 0.2, 1.0;
  EXPECT_EQ(dense.forward(x, nullptr)(0, 0), 0.0);
  dense.params()[0].value = column({1.0, 1.0});
  EXPECT_NEAR(dense.forward(x, nullptr)(0, 0), 1.7, 1e-15);
}

TEST(Dense, RequiresFlatInput) { EXPECT_THROW(make_layer(LayerSpec::dense(2, Activation::Relu), {3, 2}), ShapeError); }

TEST(Lstm, ZeroParametersGiveZeroState) {
  Lstm lstm({16, 1}, 4, false);
  for (auto& p : lstm.params()) p.value.setZero();
  std::mt19937_64 rng(1);
  Tensor y = lstm.forward(testing::random_tensor(rng, 16, 1), nullptr);
  EXPECT_EQ(y, Tensor::Zero(1, 4));
}

TEST(Lstm, SingleStepClosedForm) {
  Lstm lstm({1, 1}, 1, false);
  auto params = lstm.params();
  params[0].value.resize(1, 4);
  params[0].value << 0.5, -0.3, 0.8, 1.2;  // i, f, g, o
  params[1].value.setConstant(0.7);       // unused at the first step
  params[2].value.resize(1, 4);
  params[2].value << 0.1, 1.0, -0.2, 0.0;
  const double x = 0.9;
  Tensor y = lstm.forward(Tensor::Constant(1, 1, x), nullptr);
  double i = sigmoid(0.5 * x + 0.1), g = std::tanh(0.8 * x - 0.2), o = sigmoid(1.2 * x);
  double c = i * g;
  EXPECT_NEAR(y(0, 0), o * std::tanh(c), 1e-15);
}

TEST(Lstm, InitializerUsesForgetBiasAndOrthogonalBlocks) {
  Lstm lstm({10, 1}, 5, false);
  std::mt19937_64 rng(2);
  lstm.initialize(rng);
  const Tensor& rec = lstm.params()[1].value;
  const Tensor& bias = lstm.params()[2].value;
  for (Index g = 0; g < 4; ++g) {
    Tensor block = rec.middleCols(g * 5, 5);
    EXPECT_TRUE((block.transpose() * block).isApprox(Tensor::Identity(5, 5), 1e-12));
    for (Index u = 0; u < 5; ++u) EXPECT_EQ(bias(0, g * 5 + u), g == 1 ? 1.0 : 0.0);
  }
}

TEST(BiLstm, PalindromeWithSharedParametersGivesEqualHalves) {
  BiLstm bi({7, 1}, 3, false);
  std::mt19937_64 rng(3);
  bi.initialize(rng);
  auto params = bi.params();
  for (int k = 0; k < 3; ++k) params[3 + k].value = params[k].value;
  Tensor x = column({1, 0, 1, 1, 1, 0, 1});
  Tensor y = bi.forward(x, nullptr);
  ASSERT_EQ(y.cols(), 6);
  for (Index u = 0; u < 3; ++u) EXPECT_NEAR(y(0, u), y(0, 3 + u), 1e-15);
}

TEST(BiLstm, ZeroParametersGiveZeroOutput) {
  BiLstm bi({5, 1}, 2, true);
  for (auto& p : bi.params()) p.value.setZero();
  EXPECT_EQ(bi.forward(column({1, 0, 1, 0, 1}), nullptr), Tensor::Zero(5, 4));
}

TEST(Lstm, OutputDependsOnlyOnValues) {
  Lstm lstm({6, 1}, 3, false);
  std::mt19937_64 rng(4);
  lstm.initialize(rng);
  Tensor a = column({1, 1, 0, 1, 0, 1});
  Tensor b = a;
  EXPECT_EQ(lstm.forward(a, nullptr), lstm.forward(b, nullptr));
}

// Gradient checks on a few random shapes per layer kind; the acceptance
// binary runs the wider sweep.
class LayerGradients : public ::testing::TestWithParam<int> {};

TEST_P(LayerGradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(1000 + GetParam());
  auto pick = [&](Index lo, Index hi) { return lo + static_cast<Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
  Index steps = pick(3, 12), feat = pick(1, 3), units = pick(1, 5);
  std::vector<std::unique_ptr<Layer>> layers;
  layers.push_back(std::make_unique<Conv1D>(Shape{steps, feat}, units, pick(1, 3), Activation::Relu));
  layers.push_back(std::make_unique<Conv1D>(Shape{steps, feat}, units, pick(1, 3), Activation::Tanh));
  layers.push_back(std::make_unique<MaxPool1D>(Shape{steps, feat}, pick(1, 3)));
  layers.push_back(std::make_unique<Flatten>(Shape{steps, feat}));
  layers.push_back(std::make_unique<Dense>(Shape{1, steps}, units, Activation::Relu));
  layers.push_back(std::make_unique<Dense>(Shape{1, steps}, units, Activation::Linear));
  layers.push_back(std::make_unique<Lstm>(Shape{steps, feat}, units, false));
  layers.push_back(std::make_unique<Lstm>(Shape{steps, feat}, units, true));
  layers.push_back(std::make_unique<BiLstm>(Shape{steps, feat}, units, false));
  layers.push_back(std::make_unique<BiLstm>(Shape{steps, feat}, units, true));
  for (auto& layer : layers) {
    testing::GradCheckResult r = testing::check_layer(*layer, rng);
    EXPECT_LT(r.max_rel_error, 1e-5) << to_string(layer->spec().kind);
    EXPECT_GT(r.checked, r.skipped);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, LayerGradients, ::testing::Range(0, 3));

TEST(NetworkGradients, CnnStack) {
  Network net({12, 1}, {LayerSpec::conv1d(3, 3), LayerSpec::maxpool1d(2), LayerSpec::flatten(),
                        LayerSpec::dense(4, Activation::Relu), LayerSpec::dense(1, Activation::Linear)});
  std::mt19937_64 rng(5);
  testing::GradCheckResult r = testing::check_network(net, rng);
  EXPECT_LT(r.max_rel_error, 1e-5);
}

TEST(NetworkGradients, StackedRecurrent) {
  Network net({9, 1}, {LayerSpec::bilstm(3, true), LayerSpec::lstm(2), LayerSpec::dense(3, Activation::Relu),
                       LayerSpec::dense(1, Activation::Linear)});
  std::mt19937_64 rng(6);
  testing::GradCheckResult r = testing::check_network(net, rng);
  EXPECT_LT(r.max_rel_error, 1e-5);
}

TEST(Network, CopyIsDeep) {
  Network a({5, 1}, {LayerSpec::flatten(), LayerSpec::dense(1, Activation::Linear)});
  a.initialize(1);
  Network b = a;
  *b.parameters()[0] *= 2.0;
  EXPECT_NE(*a.parameters()[0], *b.parameters()[0]);
}

TEST(Network, ParameterNamesAndCount) {
  Network net({8, 1}, {LayerSpec::conv1d(2, 3), LayerSpec::flatten(), LayerSpec::dense(1, Activation::Linear)});
  EXPECT_EQ(net.parameter_count(), static_cast<std::size_t>(3 * 2 + 2 + 12 + 1));
  auto names = net.parameter_names();
  ASSERT_EQ(names.size(), 4u);
  EXPECT_EQ(names[2], "2.dense.kernel");
}

TEST(Network, SeededInitializationIsDeterministic) {
  std::vector<LayerSpec> specs = {LayerSpec::lstm(4), LayerSpec::dense(1, Activation::Linear)};
  Network a({10, 1}, specs), b({10, 1}, specs);
  a.initialize(77);
  b.initialize(77);
  EXPECT_EQ(a.snapshot(), b.snapshot());
  b.initialize(78);
  EXPECT_NE(a.snapshot(), b.snapshot());
}

}  // namespace
}  // namespace fdr::nn
