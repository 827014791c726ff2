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
#include <random>
#include <set>

#include "fdr/error.hpp"
#include "fdr/hpo.hpp"
#include "test_support.hpp"

namespace fdr {
namespace {

using testing::random_trace;

ModelConfig tiny_cnn() {
  ModelConfig c;
  c.window = 16;
  c.batch_size = 16;
  c.epochs = 6;
  c.filters = 2;
  c.kernel_size = 3;
  c.dense_units = {4, 1};
  c.early_stopping = false;
  return c;
}

TrialRecord trial(std::size_t id, std::vector<double> losses, std::size_t params = 10) {
  TrialRecord t;
  t.trial_id = id;
  t.val_losses = std::move(losses);
  t.parameter_count = params;
  finalize(t);
  return t;
}

TEST(Objective, HandSums) {
  auto trace = std::make_shared<const OutcomeTrace>(std::vector<std::uint8_t>(200, 1));
  auto data = split_chronological(make_windows(trace, 16, 8));
  ModelConfig c = tiny_cnn();
  Model m = build_model(c);
  auto params = m.network().parameters();
  params[params.size() - 2]->setZero();
  params.back()->setConstant(1.0);
  EXPECT_EQ(validation_objective(m, data), 0.0);
  params.back()->setConstant(0.9);
  double n = static_cast<double>(data.count(Split::Val));
  EXPECT_NEAR(validation_objective(m, data), n * 0.01, 1e-12);
  EXPECT_NEAR(validation_objective_mean(m, data), 0.01, 1e-12);
}

TEST(EpochAverage, Examples) {
  std::vector<double> constant(9, 2.5);
  EXPECT_EQ(epoch_avg_loss(constant), 2.5);
  std::vector<double> losses = {9, 9, 9, 9, 9, 3, 2, 1};
  EXPECT_EQ(epoch_avg_loss(losses), 2.0);
  EXPECT_THROW(epoch_avg_loss(std::vector<double>(5, 1.0)), ValidationError);
}

TEST(SelectSingle, Examples) {
  std::vector<TrialRecord> one = {trial(0, {1, 1, 1, 1, 1, 4})};
  EXPECT_EQ(select_best_single(one), 0u);
  std::vector<TrialRecord> three = {trial(0, {0, 0, 0, 0, 0, 2.0}), trial(1, {0, 0, 0, 0, 0, 1.5}),
                                    trial(2, {0, 0, 0, 0, 0, 1.7})};
  EXPECT_EQ(select_best_single(three), 1u);
}

TEST(SelectSingle, TiesAndInvalidTrials) {
  std::vector<TrialRecord> tied = {trial(0, {0, 0, 0, 0, 0, 1.0}, 50), trial(1, {0, 0, 0, 0, 0, 1.0}, 20),
                                   trial(2, {0, 0, 0, 0, 0, 1.0}, 20)};
  EXPECT_EQ(select_best_single(tied), 1u);
  std::vector<TrialRecord> with_short = {trial(0, {0.1, 0.1}), trial(1, {0, 0, 0, 0, 0, 3.0})};
  EXPECT_FALSE(with_short[0].valid());
  EXPECT_EQ(select_best_single(with_short), 1u);
  std::vector<TrialRecord> none = {trial(0, {0.1})};
  EXPECT_THROW(select_best_single(none), ValidationError);
}

TEST(SelectMulti, TieOnMeansGoesToFewerParameters) {
  std::vector<std::string> ch = {"ch1", "ch5", "ch9", "ch13"};
  std::vector<Candidate> cands = {{0, 100, {{"ch1", 1}, {"ch5", 1}, {"ch9", 1}, {"ch13", 5}}},
                                  {1, 40, {{"ch1", 2}, {"ch5", 2}, {"ch9", 2}, {"ch13", 2}}}};
  EXPECT_EQ(select_best_multichannel(cands, ch), 1u);
  std::vector<Candidate> single = {cands[0]};
  EXPECT_EQ(select_best_multichannel(single, ch), 0u);
}

TEST(SelectMulti, MissingChannelExcludedWithWarning) {
  std::vector<std::string> ch = {"ch1", "ch5"};
  std::vector<Candidate> cands = {{0, 10, {{"ch1", 0.1}}}, {1, 10, {{"ch1", 1.0}, {"ch5", 1.0}}}};
  testing::WarningCapture warnings;
  EXPECT_EQ(select_best_multichannel(cands, ch), 1u);
  EXPECT_EQ(warnings.messages.size(), 1u);
}

TEST(SearchSpace, EnumeratesDistinctConfigs) {
  SearchSpace space = SearchSpace::around(full_preset(ModelKind::Cnn, Condition::PerChannel));
  EXPECT_EQ(space.cardinality(), 3u * 3u * 2u);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < space.cardinality(); ++i) seen.insert(space.at(i).to_json());
  EXPECT_EQ(seen.size(), space.cardinality());
  EXPECT_THROW(space.at(space.cardinality()), RangeError);
}

TEST(Search, BudgetOneAndDeterminism) {
  std::mt19937_64 rng(1);
  auto data = split_chronological(make_windows(random_trace(rng, 600, 0.8), 16, 8));
  SearchSpace space;
  space.base = tiny_cnn();
  space.filters = {1, 2};
  space.learning_rates = {0.01, 0.005};
  std::vector<LabeledDataset> sets = {{"ch1", &data}};

  SearchResult one = search(space, sets, {1, 3, 1});
  EXPECT_EQ(one.ranking.size(), 1u);
  EXPECT_EQ(one.trials.size(), 1u);

  SearchResult a = search(space, sets, {3, 3, 1});
  SearchResult b = search(space, sets, {3, 3, 2});
  ASSERT_EQ(a.ranking.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.ranking[i].candidate_id, b.ranking[i].candidate_id);
    EXPECT_EQ(a.ranking[i].objective, b.ranking[i].objective);
  }
  EXPECT_EQ(a.best, a.ranking[0].config);
  for (std::size_t i = 1; i < a.ranking.size(); ++i) EXPECT_LE(a.ranking[i - 1].objective, a.ranking[i].objective);
}

TEST(Search, RiggedTaskRanksTheBetterCandidateFirst) {
  // Constant target: a model that can learn a bias beats one whose learning
  // rate is too small to move.
  std::vector<std::uint8_t> bits(800);
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = i % 4 != 3;
  auto data = split_chronological(make_windows(std::make_shared<const OutcomeTrace>(bits), 16, 8));
  SearchSpace space;
  space.base = tiny_cnn();
  space.learning_rates = {1e-7, 0.01};
  std::vector<LabeledDataset> sets = {{"ch1", &data}};
  SearchResult r = search(space, sets, {2, 1, 1});
  EXPECT_EQ(r.best.lr0, 0.01);
}

TEST(Search, ReportsAndMultichannel) {
  std::mt19937_64 rng(2);
  auto d1 = split_chronological(make_windows(random_trace(rng, 500, 0.8, 1), 16, 8));
  auto d2 = split_chronological(make_windows(random_trace(rng, 500, 0.6, 5), 16, 8));
  SearchSpace space;
  space.base = tiny_cnn();
  space.filters = {1, 2, 3};
  std::vector<LabeledDataset> sets = {{"ch1", &d1}, {"ch5", &d2}};
  SearchResult r = search(space, sets, {2, 9, 1});
  EXPECT_EQ(r.trials.size(), 4u);
  std::string ledger = trial_ledger_csv(r.trials);
  EXPECT_EQ(ledger.substr(0, ledger.find('\n')), "trial_id,channel,epoch,val_loss,lr");
  EXPECT_EQ(std::count(ledger.begin(), ledger.end(), '\n'), 1 + 4 * 6);
  std::string box = box_plot_csv(r);
  EXPECT_EQ(box.substr(0, box.find('\n')), "candidate_id,rank,min,q1,median,q3,max,mean");
  EXPECT_NE(search_summary_json(r).find("ranking"), std::string::npos);
}

TEST(Search, AllTrialsFailing) {
  std::mt19937_64 rng(3);
  auto data = split_chronological(make_windows(random_trace(rng, 600), 16, 8));
  SearchSpace space;
  space.base = tiny_cnn();
  space.epochs = {3};  // too few epochs for the averaged objective
  std::vector<LabeledDataset> sets = {{"ch1", &data}};
  try {
    search(space, sets, {1, 1, 1});
    FAIL() << "expected SearchError";
  } catch (const SearchError& e) {
    EXPECT_EQ(e.trials().size(), 1u);
  }
}

TEST(BoxStats, NearestRankQuartiles) {
  std::vector<double> v = {5, 1, 4, 2, 3};
  BoxStats b = box_stats(v);
  EXPECT_EQ(b.min, 1);
  EXPECT_EQ(b.q1, 2);
  EXPECT_EQ(b.median, 3);
  EXPECT_EQ(b.q3, 4);
  EXPECT_EQ(b.max, 5);
  EXPECT_EQ(b.mean, 3);
}

}  // namespace
}  // namespace fdr
