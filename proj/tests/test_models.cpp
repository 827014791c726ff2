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

#include <algorithm>
#include <filesystem>
#include <random>

#include "fdr/error.hpp"
#include "fdr/models.hpp"
#include "fdr/util.hpp"
#include "test_support.hpp"

namespace fdr {
namespace {

using testing::random_trace;

ModelConfig tiny(ModelKind kind, std::size_t window = 16) {
  ModelConfig c;
  c.kind = kind;
  c.window = window;
  c.batch_size = 8;
  c.epochs = 3;
  c.lr0 = 0.01;
  c.filters = 4;
  c.kernel_size = 3;
  c.lstm_units = {3};
  c.dense_units = {6, 1};
  c.seed = 5;
  return c;
}

// 1,1,1,0 repeated: every target over a multiple-of-4 horizon is 0.75.
std::shared_ptr<const OutcomeTrace> periodic_trace(std::size_t n) {
  std::vector<std::uint8_t> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = (i % 4 == 3) ? 0 : 1;
  return std::make_shared<const OutcomeTrace>(bits);
}

TEST(Presets, CnnPerChannelDefaults) {
  ModelConfig c = full_preset(ModelKind::Cnn, Condition::PerChannel);
  EXPECT_EQ(c.window, 3600u);
  EXPECT_EQ(c.batch_size, 64u);
  EXPECT_EQ(c.epochs, 30u);
  EXPECT_EQ(c.lr0, 0.01);
  EXPECT_EQ(c.filters, 128u);
  EXPECT_EQ(c.kernel_size, 3u);
  EXPECT_EQ(c.pool_size, 0u);
  EXPECT_EQ(c.dense_units, (std::vector<std::size_t>{128, 64, 1}));
  EXPECT_EQ(full_preset(ModelKind::Cnn, Condition::PerChannel, true).pool_size, 2u);
}

TEST(Presets, CnnAllDefaults) {
  ModelConfig c = full_preset(ModelKind::Cnn, Condition::All);
  EXPECT_EQ(c.window, 3600u);
  EXPECT_EQ(c.batch_size, 128u);
  EXPECT_EQ(c.epochs, 40u);
  EXPECT_EQ(c.lr0, 0.005);
  EXPECT_EQ(c.filters, 256u);
  EXPECT_EQ(c.kernel_size, 5u);
  EXPECT_EQ(c.dense_units, (std::vector<std::size_t>{256, 128, 64, 1}));
}

TEST(Presets, RecurrentDefaults) {
  for (ModelKind k : {ModelKind::Lstm, ModelKind::BiLstm}) {
    ModelConfig ch = full_preset(k, Condition::PerChannel);
    EXPECT_EQ(ch.window, 1200u);
    EXPECT_EQ(ch.batch_size, 32u);
    EXPECT_EQ(ch.epochs, 15u);
    EXPECT_EQ(ch.lr0, 0.01);
    EXPECT_EQ(ch.lstm_units, (std::vector<std::size_t>{25}));
    EXPECT_EQ(ch.dense_units, (std::vector<std::size_t>{1}));
    ModelConfig all = full_preset(k, Condition::All);
    EXPECT_EQ(all.window, 1200u);
    EXPECT_EQ(all.batch_size, 64u);
    EXPECT_EQ(all.epochs, 25u);
    EXPECT_EQ(all.lr0, 0.005);
    EXPECT_EQ(all.lstm_units, (std::vector<std::size_t>{25, 50}));
    EXPECT_EQ(all.dense_units, (std::vector<std::size_t>{8, 1}));
  }
}

TEST(Presets, DeskScaleIsSmaller) {
  for (ModelKind k : {ModelKind::Cnn, ModelKind::Lstm, ModelKind::BiLstm}) {
    ModelConfig d = desk_preset(k, Condition::PerChannel);
    EXPECT_EQ(d.window, 200u);
    EXPECT_EQ(d.epochs, 8u);
    EXPECT_NO_THROW(d.validate());
  }
}

TEST(Config, ValidationErrors) {
  ModelConfig c = tiny(ModelKind::Cnn);
  c.dense_units = {4, 2};
  EXPECT_THROW(c.validate(), ValidationError);
  c = tiny(ModelKind::Cnn, 4);
  c.pool_size = 5;
  EXPECT_THROW(c.validate(), ValidationError);
  c = tiny(ModelKind::Lstm);
  c.lstm_units = {};
  EXPECT_THROW(c.validate(), ValidationError);
  c = tiny(ModelKind::Cnn);
  c.lr0 = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Config, JsonRoundTrip) {
  for (ModelKind k : {ModelKind::Cnn, ModelKind::Lstm, ModelKind::BiLstm}) {
    for (Condition cond : {Condition::PerChannel, Condition::All}) {
      ModelConfig c = full_preset(k, cond, true);
      EXPECT_EQ(ModelConfig::from_json(c.to_json()), c);
    }
  }
  EXPECT_THROW(ModelConfig::from_json("{\"model\": \"gru\"}"), Error);
}

TEST(Build, CnnParameterCountMatchesFormula) {
  ModelConfig c = full_preset(ModelKind::Cnn, Condition::PerChannel);
  std::size_t conv = 3 * 128 + 128;
  std::size_t flat = (3600 - 3 + 1) * 128;
  std::size_t dense = flat * 128 + 128 + 128 * 64 + 64 + 64 + 1;
  EXPECT_EQ(build_model(c).parameter_count(), conv + dense);
}

TEST(Build, RecurrentParameterCountMatchesFormula) {
  ModelConfig c = full_preset(ModelKind::Lstm, Condition::PerChannel);
  EXPECT_EQ(build_model(c).parameter_count(), 4u * 25 * (1 + 25 + 1) + 25 + 1);
  ModelConfig b = full_preset(ModelKind::BiLstm, Condition::All);
  std::size_t first = 2 * 4 * 25 * (1 + 25 + 1);
  std::size_t second = 2 * 4 * 50 * (50 + 50 + 1);
  EXPECT_EQ(build_model(b).parameter_count(), first + second + 100 * 8 + 8 + 8 + 1);
}

TEST(Build, EqualConfigsGiveEqualModels) {
  ModelConfig c = tiny(ModelKind::BiLstm);
  Model a = build_model(c), b = build_model(c);
  EXPECT_EQ(a.parameter_count(), b.parameter_count());
  EXPECT_EQ(a.network().snapshot(), b.network().snapshot());
}

TEST(Predict, ZeroedOutputLayerPredictsZero) {
  Model m = build_model(tiny(ModelKind::Cnn));
  auto params = m.network().parameters();
  params[params.size() - 2]->setZero();
  params.back()->setZero();
  std::mt19937_64 rng(1);
  auto bits = testing::random_bits(rng, 16);
  EXPECT_EQ(m.predict(bits).raw, 0.0);
}

TEST(Predict, PureAndShapeChecked) {
  Model m = build_model(tiny(ModelKind::Lstm));
  std::mt19937_64 rng(2);
  auto bits = testing::random_bits(rng, 16);
  auto before = m.network().snapshot();
  double a = m.predict(bits).raw, b = m.predict(bits).raw;
  EXPECT_EQ(a, b);
  EXPECT_EQ(m.network().snapshot(), before);
  EXPECT_THROW(m.predict(testing::random_bits(rng, 15)), ShapeError);
}

TEST(Predict, ClampedToUnitInterval) {
  Model m = build_model(tiny(ModelKind::Cnn));
  m.network().parameters().back()->setConstant(5.0);
  auto params = m.network().parameters();
  params[params.size() - 2]->setZero();
  Prediction p = m.predict(std::vector<std::uint8_t>(16, 1));
  EXPECT_EQ(p.raw, 5.0);
  EXPECT_EQ(p.clamped, 1.0);
}

TEST(TrainEpoch, CnnIsDeterministicForSeed) {
  std::mt19937_64 rng(3);
  auto data = split_chronological(make_windows(random_trace(rng, 400), 16, 8));
  ModelConfig c = tiny(ModelKind::Cnn);
  auto run = [&] {
    Model m = build_model(c);
    nn::AdamState adam;
    train_epoch(m, adam, data, 1);
    return m.network().snapshot();
  };
  EXPECT_EQ(run(), run());
}

TEST(TrainEpoch, CnnShufflesPerEpoch) {
  std::mt19937_64 rng(4);
  auto data = split_chronological(make_windows(random_trace(rng, 400), 16, 8));
  ModelConfig c = tiny(ModelKind::Cnn);
  auto e1 = epoch_order(c, data, 1), e2 = epoch_order(c, data, 2);
  EXPECT_NE(e1, e2);
  std::sort(e1.begin(), e1.end());
  EXPECT_EQ(e1, data.indices(Split::Train));
}

TEST(TrainEpoch, RecurrentVisitsInTimeOrder) {
  std::mt19937_64 rng(5);
  auto data = split_chronological(make_windows(random_trace(rng, 300), 16, 8));
  for (ModelKind k : {ModelKind::Lstm, ModelKind::BiLstm}) {
    Model m = build_model(tiny(k));
    nn::AdamState adam;
    std::vector<std::size_t> visited;
    TrainOptions opts;
    opts.on_example = [&](std::size_t pos) { visited.push_back(pos); };
    train_epoch(m, adam, data, 1, opts);
    ASSERT_EQ(visited.size(), data.count(Split::Train));
    for (std::size_t i = 1; i < visited.size(); ++i) EXPECT_LT(data[visited[i - 1]].index, data[visited[i]].index);
  }
}

TEST(TrainEpoch, ReducesTrainingLossOnToySet) {
  std::mt19937_64 rng(6);
  auto trace = random_trace(rng, 16 + 8 + 31, 0.7);
  auto data = split_chronological(make_windows(trace, 16, 8), {1.0, 0.0, 0.0});
  ASSERT_EQ(data.count(Split::Train), 32u);
  Model m = build_model(tiny(ModelKind::Cnn));
  double before = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    double e = m.predict(data.window(k)).raw - data[k].target;
    before += e * e;
  }
  nn::AdamState adam;
  for (std::size_t epoch = 1; epoch <= 3; ++epoch) train_epoch(m, adam, data, epoch);
  double after = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    double e = m.predict(data.window(k)).raw - data[k].target;
    after += e * e;
  }
  EXPECT_LT(after, before);
}

TEST(TrainStep, SmallStepDecreasesFrozenBatchLoss) {
  std::mt19937_64 rng(7);
  for (ModelKind k : {ModelKind::Cnn, ModelKind::Lstm, ModelKind::BiLstm}) {
    ModelConfig c = tiny(k);
    c.batch_size = 64;
    c.lr0 = 1e-4;
    auto data = split_chronological(make_windows(random_trace(rng, 16 + 8 + 19), 16, 8), {1.0, 0.0, 0.0});
    Model m = build_model(c);
    auto loss = [&] { return sum_squared_error(m, data, Split::Train); };
    double before = loss();
    nn::AdamState adam;
    train_epoch(m, adam, data, 1);
    EXPECT_LT(loss(), before) << to_string(k);
  }
}

TEST(Fit, SingleEpochHistory) {
  std::mt19937_64 rng(8);
  auto data = split_chronological(make_windows(random_trace(rng, 600), 16, 8));
  ModelConfig c = tiny(ModelKind::Cnn);
  c.epochs = 1;
  TrainedModel t = fit(build_model(c), data);
  ASSERT_EQ(t.history.size(), 1u);
  EXPECT_EQ(t.best_epoch, 1u);
  EXPECT_EQ(t.history[0].lr, 0.01);
  EXPECT_NEAR(t.history[0].val_mse * static_cast<double>(data.count(Split::Val)), t.history[0].val_loss, 1e-12);
}

TEST(Fit, BestEpochHasMinimalValidationLoss) {
  std::mt19937_64 rng(9);
  auto data = split_chronological(make_windows(random_trace(rng, 1500, 0.8), 16, 8));
  ModelConfig c = tiny(ModelKind::Cnn);
  c.epochs = 6;
  TrainedModel t = fit(build_model(c), data);
  ASSERT_LE(t.history.size(), 6u);
  double best = t.history[t.best_epoch - 1].val_loss;
  for (const auto& r : t.history) EXPECT_GE(r.val_loss, best);
  // Best weights are restored.
  EXPECT_NEAR(sum_squared_error(t.model, data, Split::Val), best, 1e-9);
}

TEST(Fit, LearnsAConstantTarget) {
  auto data = split_chronological(make_windows(periodic_trace(1200), 16, 8));
  ModelConfig c = tiny(ModelKind::Cnn);
  c.epochs = 12;
  c.early_stopping = false;
  TrainedModel t = fit(build_model(c), data);
  for (std::size_t k : data.indices(Split::Test)) EXPECT_NEAR(t.model.predict(data.window(k)).raw, 0.75, 1e-2);
}

TEST(Fit, EmptyValidationSplitIsAnError) {
  std::mt19937_64 rng(10);
  testing::WarningCapture quiet;
  auto data = split_chronological(make_windows(random_trace(rng, 300), 16, 8), {1.0, 0.0, 0.0});
  EXPECT_THROW(fit(build_model(tiny(ModelKind::Cnn)), data), ValidationError);
}

TEST(Persistence, ModelRoundTripAndRunDirectory) {
  testing::TempDir dir("model");
  std::mt19937_64 rng(11);
  auto data = split_chronological(make_windows(random_trace(rng, 400), 16, 8));
  ModelConfig c = tiny(ModelKind::BiLstm);
  c.epochs = 2;
  TrainedModel t = fit(build_model(c), data);
  save_model(dir.path() / "m.ckpt", t.model, 2, 0.005);
  Model back = load_model(dir.path() / "m.ckpt");
  EXPECT_EQ(back.config().to_json(), t.model.config().to_json());
  EXPECT_EQ(back.network().snapshot(), t.model.network().snapshot());

  save_run(dir.path() / "run", t);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "run" / "config.json"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "run" / "model.ckpt"));
  std::string hist = read_file_text(dir.path() / "run" / "history.csv");
  EXPECT_EQ(hist.substr(0, hist.find('\n')), "epoch,train_loss,val_loss,lr");
}

}  // namespace
}  // namespace fdr
