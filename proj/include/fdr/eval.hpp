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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fdr/dataset.hpp"
#include "fdr/models.hpp"

namespace fdr {

/// Signed errors e_i = prediction_i - target_i over the test split, in
/// dataset order. `raw` uses the network output, `clamped` the prediction
/// clamped to [0, 1] (the headline series).
struct ErrorSeries {
  std::vector<double> raw;
  std::vector<double> clamped;
};

ErrorSeries error_series(const Model& model, const WindowedDataset& data, Split split = Split::Test);

/// Nearest-rank percentile: the ceil(p*n/100)-th smallest value (1-based),
/// with p = 0 giving the minimum.
double percentile(std::span<const double> values, double p);

/// Error statistics of one (test channel, train condition, model) cell.
/// All values are stored as plain fractions; scaling happens when formatted.
struct MetricsReport {
  std::string test_channel;
  std::string train_condition;
  std::string model;
  std::size_t count = 0;

  double mu_e2 = 0, e2_p90 = 0, e2_p95 = 0, e2_p99 = 0, e2_max = 0;
  double mu_abs = 0, sigma_abs = 0, abs_p90 = 0, abs_p95 = 0, abs_p99 = 0, abs_max = 0;
  double e_min = 0, e_p5 = 0, e_p95 = 0, e_max = 0;
};

MetricsReport metrics_report(std::span<const double> errors);

/// Column names, in table order.
std::vector<std::string> metrics_columns();
/// One CSV row per report; e^2 columns scaled by 10^3, the rest in percent.
std::string metrics_csv(std::span<const MetricsReport> reports);
/// Aligned plain-text rendering of the same table.
std::string metrics_table(std::span<const MetricsReport> reports);

struct ResourceProfile {
  std::string model;
  std::string condition;
  double mean_ms = 0.0;    ///< mean wall time of one single-window prediction
  double mem_mb = 0.0;     ///< mean live working memory during a prediction
  double peak_mb = 0.0;    ///< peak live working memory during a prediction
  double param_mb = 0.0;   ///< resident parameter storage
  std::size_t repetitions = 0;
  std::string method;      ///< how memory was measured
};

/// Times `repetitions` single-window predictions (cycling through `windows`)
/// after a short warm-up and measures the heap working set of one prediction.
/// Memory is measured through the allocation hook when it is linked into the
/// executable, otherwise estimated from layer output sizes. Requires at least
/// 100 repetitions.
ResourceProfile profile_inference(const Model& model, std::span<const std::vector<std::uint8_t>> windows,
                                  std::size_t repetitions = 1000);

/// model,condition,mean_ms,mem_mb,peak_mb
std::string profile_csv(std::span<const ResourceProfile> profiles);

}  // namespace fdr
