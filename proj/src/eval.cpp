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

#include "fdr/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "fdr/alloc_stats.hpp"
#include "fdr/error.hpp"
#include "fdr/util.hpp"

namespace fdr {

ErrorSeries error_series(const Model& model, const WindowedDataset& data, Split split) {
  std::vector<Prediction> preds = predict_split(model, data, split);
  std::vector<double> targets = targets_of(data, split);
  ErrorSeries out;
  out.raw.reserve(preds.size());
  out.clamped.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out.raw.push_back(preds[i].raw - targets[i]);
    out.clamped.push_back(preds[i].clamped - targets[i]);
  }
  return out;
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw ValidationError("percentile of an empty sequence");
  if (!(p >= 0.0 && p <= 100.0)) throw RangeError("percentile must be in [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n / 100.0));
  if (rank == 0) return sorted.front();
  return sorted[std::min(rank, sorted.size()) - 1];
}

MetricsReport metrics_report(std::span<const double> errors) {
  if (errors.empty()) throw ValidationError("no errors to summarize");
  std::vector<double> sq, ab;
  sq.reserve(errors.size());
  ab.reserve(errors.size());
  double sum_sq = 0.0, sum_abs = 0.0;
  for (double e : errors) {
    sq.push_back(e * e);
    ab.push_back(std::abs(e));
    sum_sq += e * e;
    sum_abs += std::abs(e);
  }
  double n = static_cast<double>(errors.size());
  MetricsReport r;
  r.count = errors.size();
  r.mu_e2 = sum_sq / n;
  r.e2_p90 = percentile(sq, 90);
  r.e2_p95 = percentile(sq, 95);
  r.e2_p99 = percentile(sq, 99);
  r.e2_max = *std::max_element(sq.begin(), sq.end());
  r.mu_abs = sum_abs / n;
  double var = 0.0;
  for (double a : ab) var += (a - r.mu_abs) * (a - r.mu_abs);
  r.sigma_abs = std::sqrt(var / n);
  r.abs_p90 = percentile(ab, 90);
  r.abs_p95 = percentile(ab, 95);
  r.abs_p99 = percentile(ab, 99);
  r.abs_max = *std::max_element(ab.begin(), ab.end());
  r.e_min = *std::min_element(errors.begin(), errors.end());
  r.e_p5 = percentile(errors, 5);
  r.e_p95 = percentile(errors, 95);
  r.e_max = *std::max_element(errors.begin(), errors.end());
  return r;
}

namespace {

const std::vector<std::string> kValueColumns = {
    "mu_e2",  "e2_p90",    "e2_p95",  "e2_p99",  "e2_max",  "mu_abs_e", "sigma_abs_e", "abs_e_p90",
    "abs_e_p95", "abs_e_p99", "abs_e_max", "e_min", "e_p5",   "e_p95",   "e_max"};

std::vector<double> scaled_values(const MetricsReport& r) {
  constexpr double kSq = 1e3, kPct = 1e2;
  return {r.mu_e2 * kSq,    r.e2_p90 * kSq,  r.e2_p95 * kSq,  r.e2_p99 * kSq,  r.e2_max * kSq,
          r.mu_abs * kPct,  r.sigma_abs * kPct, r.abs_p90 * kPct, r.abs_p95 * kPct, r.abs_p99 * kPct,
          r.abs_max * kPct, r.e_min * kPct,  r.e_p5 * kPct,    r.e_p95 * kPct,   r.e_max * kPct};
}

// Scaled values carry representation noise (0.025 * 1e3 = 25.000000000000004);
// ten significant digits is well beyond what the table needs.
std::string scaled(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

std::vector<std::string> metrics_columns() {
  std::vector<std::string> cols = {"test_ch", "train_ch", "model"};
  cols.insert(cols.end(), kValueColumns.begin(), kValueColumns.end());
  return cols;
}

std::string metrics_csv(std::span<const MetricsReport> reports) {
  std::string out;
  auto cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& r : reports) {
    out += r.test_channel + "," + r.train_condition + "," + r.model;
    for (double v : scaled_values(r)) out += "," + scaled(v);
    out += '\n';
  }
  return out;
}

std::string metrics_table(std::span<const MetricsReport> reports) {
  auto cols = metrics_columns();
  std::vector<std::vector<std::string>> rows;
  rows.push_back(cols);
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.test_channel, r.train_condition, r.model};
    for (double v : scaled_values(r)) row.push_back(fixed(v, 2));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(cols.size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      if (c < 3)
        os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      else
        os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
    }
    os << '\n';
  }
  return os.str();
}

namespace {

constexpr double kMiB = 1024.0 * 1024.0;

// Rough working-set estimate from layer shapes, used when the allocation hook
// is not linked into the running executable.
void analytic_working_set(const nn::Network& net, double& mean_bytes, double& peak_bytes) {
  double total = 0.0, peak = 0.0;
  std::size_t n = net.layer_count();
  for (std::size_t i = 0; i < n; ++i) {
    const nn::Layer& layer = net.layer(i);
    auto in = static_cast<double>(layer.input_shape().numel());
    auto out = static_cast<double>(layer.output_shape().numel());
    double scratch = 0.0;
    const nn::LayerSpec& spec = layer.spec();
    double steps = static_cast<double>(layer.input_shape().steps);
    double units = static_cast<double>(spec.units);
    switch (spec.kind) {
      case nn::LayerKind::Conv1D:
        scratch = static_cast<double>(layer.output_shape().steps) * static_cast<double>(spec.kernel_size) *
                  static_cast<double>(layer.input_shape().features);
        break;
      case nn::LayerKind::Lstm:
        scratch = 2.0 * steps * 4.0 * units + 2.0 * (steps + 1.0) * units;
        break;
      case nn::LayerKind::BiLstm:
        scratch = 2.0 * (2.0 * steps * 4.0 * units + 2.0 * (steps + 1.0) * units) + in;
        break;
      default:
        break;
    }
    double live = (in + out + scratch) * sizeof(double);
    total += live;
    peak = std::max(peak, live);
  }
  mean_bytes = n ? total / static_cast<double>(n) : 0.0;
  peak_bytes = peak;
}

}  // namespace

ResourceProfile profile_inference(const Model& model, std::span<const std::vector<std::uint8_t>> windows,
                                  std::size_t repetitions) {
  if (repetitions < 100) throw ValidationError("profiling needs at least 100 repetitions");
  if (windows.empty()) throw ValidationError("profiling needs at least one window");
  for (const auto& w : windows)
    if (w.size() != model.config().window) throw ShapeError("profiling window length does not match the model");

  ResourceProfile prof;
  prof.model = to_string(model.config().kind);
  prof.condition = to_string(model.config().condition);
  prof.repetitions = repetitions;
  prof.param_mb = static_cast<double>(model.parameter_count()) * sizeof(double) / kMiB;

  volatile double sink = 0.0;
  std::size_t warmup = std::min<std::size_t>(10, repetitions);
  for (std::size_t i = 0; i < warmup; ++i) sink = sink + model.predict(windows[i % windows.size()]).raw;

  if (alloc::tracking_active()) {
    // Working set of a single prediction: live heap above the pre-call level.
    std::size_t base = alloc::current_bytes();
    alloc::reset_peak();
    alloc::reset_samples();
    sink = sink + model.predict(windows.front()).raw;
    double mean = alloc::mean_sampled_bytes();
    std::size_t peak = alloc::peak_bytes();
    prof.mem_mb = std::max(0.0, mean - static_cast<double>(base)) / kMiB;
    prof.peak_mb = static_cast<double>(peak > base ? peak - base : 0) / kMiB;
    prof.method = "heap";
  } else {
    double mean = 0.0, peak = 0.0;
    analytic_working_set(model.network(), mean, peak);
    prof.mem_mb = mean / kMiB;
    prof.peak_mb = peak / kMiB;
    prof.method = "analytic";
  }

  auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < repetitions; ++i) sink = sink + model.predict(windows[i % windows.size()]).raw;
  auto stop = std::chrono::steady_clock::now();
  prof.mean_ms = std::chrono::duration<double, std::milli>(stop - start).count() / static_cast<double>(repetitions);
  (void)sink;
  return prof;
}

std::string profile_csv(std::span<const ResourceProfile> profiles) {
  std::string out = "model,condition,mean_ms,mem_mb,peak_mb\n";
  for (const auto& p : profiles)
    out += p.model + "," + p.condition + "," + format_double(p.mean_ms) + "," + format_double(p.mem_mb) + "," +
           format_double(p.peak_mb) + "\n";
  return out;
}

}  // namespace fdr
