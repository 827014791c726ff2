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
#include <cmath>
#include <random>

#include "fdr/alloc_stats.hpp"
#include "fdr/error.hpp"
#include "fdr/eval.hpp"
#include "test_support.hpp"

namespace fdr {
namespace {

// Sort-and-index oracle, written independently of the library routine.
double oracle_percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  if (p == 0.0) return v.front();
  std::size_t k = 1;
  while (100.0 * static_cast<double>(k) < p * static_cast<double>(v.size())) ++k;
  return v[k - 1];
}

TEST(Percentile, Examples) {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
  EXPECT_EQ(percentile(v, 95), 95);
  EXPECT_EQ(percentile(v, 0), 1);
  EXPECT_EQ(percentile(v, 100), 100);
  std::vector<double> single = {0.42};
  for (double p : {0.0, 5.0, 50.0, 99.0, 100.0}) EXPECT_EQ(percentile(single, p), 0.42);
  EXPECT_THROW(percentile(std::vector<double>{}, 50), ValidationError);
  EXPECT_THROW(percentile(v, 101), RangeError);
}

TEST(Percentile, MatchesOracleAndIsMonotone) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + rng() % 300);
    for (auto& x : v) x = d(rng);
    double prev = -INFINITY;
    for (double p : {0.0, 1.0, 5.0, 25.0, 50.0, 90.0, 95.0, 99.0, 100.0}) {
      double q = percentile(v, p);
      EXPECT_EQ(q, oracle_percentile(v, p));
      EXPECT_GE(q, prev);
      prev = q;
    }
  }
}

TEST(Metrics, ConstantError) {
  std::vector<double> e(50, 0.1);
  MetricsReport r = metrics_report(e);
  EXPECT_NEAR(r.mu_e2, 0.01, 1e-15);
  EXPECT_NEAR(r.mu_abs, 0.1, 1e-15);
  EXPECT_NEAR(r.sigma_abs, 0.0, 1e-15);
  EXPECT_EQ(r.e_min, 0.1);
  EXPECT_EQ(r.count, 50u);
}

TEST(Metrics, SignFlipSwapsSignedTails) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.02, 0.1);
  std::vector<double> e(999), neg(999);
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = d(rng);
    neg[i] = -e[i];
  }
  MetricsReport a = metrics_report(e), b = metrics_report(neg);
  EXPECT_EQ(b.e_min, -a.e_max);
  EXPECT_EQ(b.e_max, -a.e_min);
  EXPECT_EQ(a.abs_p95, b.abs_p95);
  EXPECT_EQ(a.e2_p99, b.e2_p99);
  EXPECT_EQ(a.abs_max, b.abs_max);
  EXPECT_NEAR(a.mu_e2, b.mu_e2, 1e-18);
  EXPECT_NEAR(a.sigma_abs, b.sigma_abs, 1e-15);
}

TEST(Metrics, CsvColumnLayout) {
  MetricsReport r = metrics_report(std::vector<double>{0.1, -0.2});
  r.test_channel = "ch1";
  r.train_condition = "all";
  r.model = "cnn";
  std::vector<MetricsReport> rows = {r};
  std::string csv = metrics_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "test_ch,train_ch,model,mu_e2,e2_p90,e2_p95,e2_p99,e2_max,mu_abs_e,sigma_abs_e,abs_e_p90,abs_e_p95,"
            "abs_e_p99,abs_e_max,e_min,e_p5,e_p95,e_max");
  // mu_e2 = 0.025 -> 25 (x1e-3 units); mu_|e| = 0.15 -> 15 (%).
  std::string row = csv.substr(csv.find('\n') + 1);
  EXPECT_EQ(row.substr(0, 15), "ch1,all,cnn,25,");
  EXPECT_NE(metrics_table(rows).find("mu_e2"), std::string::npos);
}

TEST(ErrorSeries, MatchesPointwiseRecomputation) {
  std::mt19937_64 rng(4);
  auto trace = testing::random_trace(rng, 400, 0.8);
  auto data = split_chronological(make_windows(trace, 16, 8));
  ModelConfig c;
  c.window = 16;
  c.filters = 2;
  c.dense_units = {3, 1};
  Model m = build_model(c);
  ErrorSeries es = error_series(m, data);
  auto test = data.indices(Split::Test);
  ASSERT_EQ(es.raw.size(), test.size());
  for (std::size_t j = 0; j < test.size(); ++j) {
    const Example& ex = data[test[j]];
    double expect = m.predict(data.window(test[j])).raw - fdr_target(*trace, ex.index, 8);
    EXPECT_EQ(es.raw[j], expect);
  }
}

TEST(ErrorSeries, ConstantHalfPredictor) {
  // Targets 0 and 1 over horizon 1, predicting 0.5 -> errors +0.5 and -0.5.
  auto trace = std::make_shared<const OutcomeTrace>(std::vector<std::uint8_t>{1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0});
  auto data = split_chronological(make_windows(trace, 2, 1), {0.4, 0.2, 0.4});
  ModelConfig c;
  c.window = 2;
  c.kernel_size = 1;
  c.filters = 1;
  c.dense_units = {1};
  Model m = build_model(c);
  auto params = m.network().parameters();
  params[params.size() - 2]->setZero();
  params.back()->setConstant(0.5);
  ErrorSeries es = error_series(m, data);
  ASSERT_FALSE(es.clamped.empty());
  for (std::size_t j = 0; j < es.clamped.size(); ++j) EXPECT_EQ(std::abs(es.clamped[j]), 0.5);
}

TEST(Profile, PureAndRecordsMethod) {
  ModelConfig c = desk_preset(ModelKind::Lstm, Condition::PerChannel);
  Model m = build_model(c);
  std::mt19937_64 rng(5);
  std::vector<std::vector<std::uint8_t>> windows = {testing::random_bits(rng, c.window),
                                                    testing::random_bits(rng, c.window)};
  auto before = m.network().snapshot();
  ResourceProfile p = profile_inference(m, windows, 100);
  EXPECT_EQ(m.network().snapshot(), before);
  EXPECT_GT(p.mean_ms, 0.0);
  EXPECT_GT(p.peak_mb, 0.0);
  EXPECT_GE(p.peak_mb, p.mem_mb);
  EXPECT_EQ(p.method, alloc::tracking_active() ? "heap" : "analytic");
  EXPECT_THROW(profile_inference(m, windows, 99), ValidationError);
  std::vector<ResourceProfile> rows = {p};
  std::string csv = profile_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,condition,mean_ms,mem_mb,peak_mb");
}

TEST(Profile, BiggerCnnIsSlower) {
  std::mt19937_64 rng(6);
  ModelConfig small = desk_preset(ModelKind::Cnn, Condition::PerChannel);
  ModelConfig large = desk_preset(ModelKind::Cnn, Condition::All);
  std::vector<std::vector<std::uint8_t>> windows = {testing::random_bits(rng, small.window)};
  ResourceProfile a = profile_inference(build_model(small), windows, 300);
  ResourceProfile b = profile_inference(build_model(large), windows, 300);
  EXPECT_GE(b.mean_ms, a.mean_ms);
}

}  // namespace
}  // namespace fdr
