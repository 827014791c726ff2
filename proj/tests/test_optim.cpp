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

#include "fdr/error.hpp"
#include "fdr/nn/optim.hpp"

namespace fdr::nn {
namespace {

TEST(Loss, Examples) {
  std::vector<double> p = {0.0, 1.0}, t = {1.0, 1.0};
  EXPECT_EQ(mse_loss(t, t), 0.0);
  EXPECT_EQ(mse_loss(p, t), 0.5);
  EXPECT_EQ(sse_loss(p, t), 1.0);
  EXPECT_THROW(mse_loss(std::vector<double>{}, std::vector<double>{}), ValidationError);
  EXPECT_THROW(mse_loss(p, std::vector<double>{1.0}), ShapeError);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Tensor w = Tensor::Constant(2, 2, 0.3);
  std::vector<Tensor*> params = {&w};
  std::vector<Tensor> grads = {Tensor::Zero(2, 2)};
  AdamState state;
  adam_step(params, grads, state, 0.1);
  EXPECT_EQ(w, Tensor::Constant(2, 2, 0.3));
  EXPECT_EQ(state.m[0], Tensor::Zero(2, 2));
  EXPECT_EQ(state.v[0], Tensor::Zero(2, 2));
}

TEST(Adam, FirstStepOnUnitGradient) {
  Tensor w = Tensor::Constant(1, 1, 1.0);
  std::vector<Tensor*> params = {&w};
  std::vector<Tensor> grads = {Tensor::Constant(1, 1, 1.0)};
  AdamState state;
  adam_step(params, grads, state, 0.1);
  // m_hat = v_hat = 1, so the step is lr / (1 + eps).
  EXPECT_NEAR(w(0, 0), 1.0 - 0.1 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, MatchesReferenceRecurrence) {
  Tensor w = Tensor::Constant(1, 1, 0.5);
  std::vector<Tensor*> params = {&w};
  AdamState state;
  double m = 0, v = 0, ref = 0.5;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8, lr = 0.01;
  for (int t = 1; t <= 20; ++t) {
    double g = std::sin(t) + 0.3;
    adam_step(params, std::vector<Tensor>{Tensor::Constant(1, 1, g)}, state, lr);
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    double mh = m / (1 - std::pow(b1, t)), vh = v / (1 - std::pow(b2, t));
    ref -= lr * mh / (std::sqrt(vh) + eps);
    EXPECT_NEAR(w(0, 0), ref, 1e-14);
  }
}

TEST(Adam, ShapeMismatchIsRejected) {
  Tensor w = Tensor::Zero(2, 2);
  std::vector<Tensor*> params = {&w};
  AdamState state;
  EXPECT_THROW(adam_step(params, std::vector<Tensor>{Tensor::Zero(1, 2)}, state, 0.1), ShapeError);
}

TEST(LearningRate, Halving) {
  EXPECT_EQ(lr_at_epoch(0.01, 1), 0.01);
  EXPECT_EQ(lr_at_epoch(0.01, 3), 0.0025);
  for (std::size_t tau = 1; tau <= 40; ++tau) EXPECT_EQ(lr_at_epoch(0.005, tau), std::ldexp(0.005, -static_cast<int>(tau - 1)));
  EXPECT_THROW(lr_at_epoch(0.01, 0), ValidationError);
}

TEST(EarlyStopping, StrictlyDecreasingNeverStops) {
  EarlyStopping es(3);
  for (int e = 1; e <= 30; ++e) EXPECT_FALSE(es.update(1.0 / e).stop);
  EXPECT_EQ(es.best_epoch(), 30u);
}

TEST(EarlyStopping, PatienceThreeTrace) {
  EarlyStopping es(3);
  std::vector<double> losses = {1.0, 0.5, 0.6, 0.7, 0.8};
  for (std::size_t k = 0; k < losses.size(); ++k) {
    auto d = es.update(losses[k]);
    EXPECT_EQ(d.stop, k == 4) << k;
  }
  EXPECT_EQ(es.best_epoch(), 2u);
  EXPECT_EQ(es.best_loss(), 0.5);
}

TEST(EarlyStopping, PatienceZeroStopsAtFirstNonImprovement) {
  EarlyStopping es(0);
  EXPECT_FALSE(es.update(1.0).stop);
  EXPECT_FALSE(es.update(0.9).stop);
  EXPECT_TRUE(es.update(0.9).stop);
}

TEST(EarlyStopping, MinDeltaCountsSmallGainsAsStalls) {
  EarlyStopping es(1, 0.1);
  EXPECT_FALSE(es.update(1.0).stop);
  EXPECT_TRUE(es.update(0.95).stop);
  EXPECT_EQ(es.best_epoch(), 1u);
}

}  // namespace
}  // namespace fdr::nn
