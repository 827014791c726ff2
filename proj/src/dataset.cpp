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

#include "fdr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fdr/error.hpp"

namespace fdr {

using nlohmann::json;

double fdr_target(const OutcomeTrace& trace, std::size_t i, std::size_t horizon) {
  if (horizon == 0) throw ValidationError("horizon must be positive");
  if (i >= trace.size() || horizon > trace.size() - 1 - i) {
    throw RangeError("target horizon [" + std::to_string(i + 1) + ", " + std::to_string(i + horizon) +
                     "] runs past the trace end (N=" + std::to_string(trace.size()) + ")");
  }
  auto x = trace.outcomes();
  std::uint64_t ones = 0;
  for (std::size_t j = i + 1; j <= i + horizon; ++j) ones += x[j];
  return static_cast<double>(ones) / static_cast<double>(horizon);
}

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

const IndexRange& SourceLayout::range(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::Val: return val;
    case Split::Test: return test;
  }
  return train;
}

WindowedDataset::WindowedDataset(std::vector<std::shared_ptr<const OutcomeTrace>> sources, std::size_t window,
                                 std::size_t horizon, std::size_t stride, std::vector<Example> examples)
    : sources_(std::move(sources)), window_(window), horizon_(horizon), stride_(stride), examples_(std::move(examples)) {
  if (window_ == 0 || horizon_ == 0 || stride_ == 0) {
    throw ValidationError("window, horizon and stride must be positive");
  }
  for (const auto& e : examples_) {
    if (e.source >= sources_.size()) throw ValidationError("example refers to a missing source");
    const auto& tr = *sources_[e.source];
    if (e.index + 1 < window_ || e.index + horizon_ > tr.size() - 1) {
      throw RangeError("example at index " + std::to_string(e.index) + " does not fit its trace");
    }
  }
}

std::span<const std::uint8_t> WindowedDataset::window(std::size_t k) const {
  const Example& e = examples_.at(k);
  return sources_[e.source]->outcomes().subspan(e.index + 1 - window_, window_);
}

std::vector<std::size_t> WindowedDataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < examples_.size(); ++k) {
    if (examples_[k].split == s) out.push_back(k);
  }
  return out;
}

std::size_t WindowedDataset::count(Split s) const {
  return static_cast<std::size_t>(
      std::count_if(examples_.begin(), examples_.end(), [s](const Example& e) { return e.split == s; }));
}

WindowedDataset WindowedDataset::only_source(std::uint32_t source) const {
  if (source >= sources_.size()) throw RangeError("no such source");
  std::vector<Example> kept;
  for (const auto& e : examples_) {
    if (e.source == source) {
      kept.push_back(e);
      kept.back().source = 0;
    }
  }
  WindowedDataset out({sources_[source]}, window_, horizon_, stride_, std::move(kept));
  out.gap_ = gap_;
  out.fractions_ = fractions_;
  if (!layouts_.empty()) out.layouts_ = {layouts_[source]};
  return out;
}

WindowedDataset make_windows(std::shared_ptr<const OutcomeTrace> trace, std::size_t window, std::size_t horizon,
                             std::size_t stride) {
  if (!trace) throw ValidationError("null trace");
  if (window == 0 || horizon == 0 || stride == 0) {
    throw ValidationError("window, horizon and stride must be positive");
  }
  const std::size_t n = trace->size();
  if (n < window + horizon) {
    throw RangeError("no examples: trace of " + std::to_string(n) + " samples is shorter than window + horizon = " +
                     std::to_string(window + horizon));
  }
  const std::size_t count = (n - horizon - window) / stride + 1;

  // Prefix sums keep targets as one integer division each.
  auto x = trace->outcomes();
  std::vector<std::uint64_t> prefix(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + x[j];

  std::vector<Example> examples(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t i = window - 1 + k * stride;
    std::uint64_t ones = prefix[i + horizon + 1] - prefix[i + 1];
    examples[k] = {0, i, static_cast<double>(ones) / static_cast<double>(horizon), Split::Train};
  }
  return WindowedDataset({std::move(trace)}, window, horizon, stride, std::move(examples));
}

std::size_t guard_gap(std::size_t window, std::size_t horizon, std::size_t stride) {
  return (window + horizon + stride - 1) / stride - 1;
}

WindowedDataset split_chronological(const WindowedDataset& dataset, SplitFractions f) {
  const double parts[3] = {f.train, f.val, f.test};
  for (double p : parts) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("split fractions must lie in [0,1]");
  }
  if (std::abs(f.train + f.val + f.test - 1.0) > 1e-9) throw ValidationError("split fractions must sum to 1");
  if (dataset.empty()) throw ValidationError("cannot split an empty dataset");
  if (f.val == 0.0) warn("validation split is empty");
  if (f.test == 0.0) warn("test split is empty");

  const std::size_t gap = guard_gap(dataset.window_length(), dataset.horizon(), dataset.stride());
  std::vector<Example> kept;
  std::vector<SourceLayout> layouts;

  for (std::uint32_t s = 0; s < dataset.sources().size(); ++s) {
    std::vector<Example> mine;
    for (const auto& e : dataset.examples()) {
      if (e.source == s) mine.push_back(e);
    }
    std::sort(mine.begin(), mine.end(), [](const Example& a, const Example& b) { return a.index < b.index; });

    int nonempty = 0;
    int last_nonempty = 0;
    for (int b = 0; b < 3; ++b) {
      if (parts[b] > 0.0) {
        ++nonempty;
        last_nonempty = b;
      }
    }
    const std::size_t boundaries = static_cast<std::size_t>(nonempty - 1);
    const std::size_t n = mine.size();
    if (n < boundaries * gap + static_cast<std::size_t>(nonempty)) {
      throw ValidationError("source " + std::to_string(s) + " has " + std::to_string(n) +
                            " examples; splitting needs at least " +
                            std::to_string(boundaries * gap + static_cast<std::size_t>(nonempty)) +
                            " (one per split plus guard gaps of " + std::to_string(gap) + ")");
    }
    const std::size_t avail = n - boundaries * gap;
    std::size_t counts[3];
    std::size_t assigned = 0;
    for (int b = 0; b < 3; ++b) {
      counts[b] = static_cast<std::size_t>(std::floor(parts[b] * static_cast<double>(avail)));
      assigned += counts[b];
    }
    counts[last_nonempty] += avail - assigned;
    for (int b = 0; b < 3; ++b) {
      if (parts[b] > 0.0 && counts[b] == 0) {
        throw ValidationError("source " + std::to_string(s) + " is too short: split '" +
                              split_name(static_cast<Split>(b)) + "' would be empty");
      }
    }

    SourceLayout layout;
    layout.total_examples = n;
    IndexRange* ranges[3] = {&layout.train, &layout.val, &layout.test};
    std::size_t cursor = 0;
    bool placed_any = false;
    for (int b = 0; b < 3; ++b) {
      if (counts[b] == 0) continue;
      if (placed_any) cursor += gap;
      placed_any = true;
      *ranges[b] = {mine[cursor].index, mine[cursor + counts[b] - 1].index, counts[b]};
      for (std::size_t k = 0; k < counts[b]; ++k) {
        Example e = mine[cursor + k];
        e.split = static_cast<Split>(b);
        kept.push_back(e);
      }
      cursor += counts[b];
    }
    layouts.push_back(layout);
  }

  WindowedDataset out(dataset.sources(), dataset.window_length(), dataset.horizon(), dataset.stride(),
                      std::move(kept));
  out.gap_ = gap;
  out.layouts_ = std::move(layouts);
  out.fractions_ = f;
  return out;
}

WindowedDataset concat_datasets(std::span<const WindowedDataset> parts) {
  if (parts.empty()) throw ValidationError("nothing to concatenate");
  const auto& head = parts.front();
  std::vector<std::shared_ptr<const OutcomeTrace>> sources;
  std::vector<Example> examples;
  std::vector<SourceLayout> layouts;
  for (const auto& p : parts) {
    if (p.window_length() != head.window_length() || p.horizon() != head.horizon() || p.stride() != head.stride()) {
      throw ValidationError("cannot concatenate datasets with different window/horizon/stride");
    }
    if (p.is_split() != head.is_split()) throw ValidationError("cannot mix split and unsplit datasets");
    auto offset = static_cast<std::uint32_t>(sources.size());
    sources.insert(sources.end(), p.sources().begin(), p.sources().end());
    for (Example e : p.examples()) {
      e.source += offset;
      examples.push_back(e);
    }
    layouts.insert(layouts.end(), p.layouts().begin(), p.layouts().end());
  }
  WindowedDataset out(std::move(sources), head.window_length(), head.horizon(), head.stride(), std::move(examples));
  out.gap_ = head.gap_;
  out.layouts_ = std::move(layouts);
  out.fractions_ = head.fractions_;
  return out;
}

WindowedDataset oversample_minority(const WindowedDataset& dataset) {
  std::size_t counts[2] = {0, 0};
  for (const auto& e : dataset.examples()) {
    if (e.split == Split::Train) ++counts[(*dataset.sources()[e.source])[e.index]];
  }
  if (counts[0] == 0 || counts[1] == 0) return dataset;
  const int minority = counts[0] < counts[1] ? 0 : 1;
  const auto copies = static_cast<std::size_t>(
      std::llround(static_cast<double>(counts[1 - minority]) / static_cast<double>(counts[minority])));

  std::vector<Example> out;
  out.reserve(dataset.size() + counts[minority] * (copies - 1));
  for (const auto& e : dataset.examples()) {
    out.push_back(e);
    if (e.split == Split::Train && (*dataset.sources()[e.source])[e.index] == minority) {
      for (std::size_t c = 1; c < copies; ++c) out.push_back(e);
    }
  }
  WindowedDataset result(dataset.sources(), dataset.window_length(), dataset.horizon(), dataset.stride(),
                         std::move(out));
  result.gap_ = dataset.gap_;
  result.layouts_ = dataset.layouts_;
  result.fractions_ = dataset.fractions_;
  return result;
}

ClassBalance class_balance(const OutcomeTrace& trace) {
  double p1 = trace.success_ratio();
  return {1.0 - p1, p1};
}

// --- manifest -----------------------------------------------------------------

namespace {

json range_json(const IndexRange& r) { return {{"first", r.first}, {"last", r.last}, {"count", r.count}}; }

IndexRange range_from(const json& j) {
  return {j.at("first").get<std::size_t>(), j.at("last").get<std::size_t>(), j.at("count").get<std::size_t>()};
}

}  // namespace

std::string DatasetManifest::to_json() const {
  json j;
  j["format"] = "fdr-dataset-manifest";
  j["version"] = 1;
  j["window"] = window;
  j["horizon"] = horizon;
  j["stride"] = stride;
  j["fractions"] = {{"train", fractions.train}, {"val", fractions.val}, {"test", fractions.test}};
  j["gap"] = gap;
  j["sources"] = json::array();
  for (const auto& s : sources) {
    j["sources"].push_back({{"channel", s.channel},
                            {"length", s.length},
                            {"sha256", s.sha256},
                            {"total_examples", s.layout.total_examples},
                            {"train", range_json(s.layout.train)},
                            {"val", range_json(s.layout.val)},
                            {"test", range_json(s.layout.test)}});
  }
  return j.dump(2);
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
  DatasetManifest m;
  try {
    json j = json::parse(text);
    if (j.at("format") != "fdr-dataset-manifest") throw ValidationError("not a dataset manifest");
    m.window = j.at("window").get<std::size_t>();
    m.horizon = j.at("horizon").get<std::size_t>();
    m.stride = j.at("stride").get<std::size_t>();
    const auto& f = j.at("fractions");
    m.fractions = {f.at("train").get<double>(), f.at("val").get<double>(), f.at("test").get<double>()};
    m.gap = j.at("gap").get<std::size_t>();
    for (const auto& s : j.at("sources")) {
      Source src;
      src.channel = s.at("channel").get<std::uint32_t>();
      src.length = s.at("length").get<std::size_t>();
      src.sha256 = s.at("sha256").get<std::string>();
      src.layout.total_examples = s.at("total_examples").get<std::size_t>();
      src.layout.train = range_from(s.at("train"));
      src.layout.val = range_from(s.at("val"));
      src.layout.test = range_from(s.at("test"));
      m.sources.push_back(std::move(src));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed dataset manifest: ") + e.what());
  }
  return m;
}

bool DatasetManifest::operator==(const DatasetManifest& o) const {
  if (window != o.window || horizon != o.horizon || stride != o.stride || gap != o.gap) return false;
  if (fractions.train != o.fractions.train || fractions.val != o.fractions.val || fractions.test != o.fractions.test) {
    return false;
  }
  if (sources.size() != o.sources.size()) return false;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const auto& a = sources[k];
    const auto& b = o.sources[k];
    if (a.channel != b.channel || a.length != b.length || a.sha256 != b.sha256 || !(a.layout == b.layout)) {
      return false;
    }
  }
  return true;
}

DatasetManifest describe(const WindowedDataset& dataset) {
  if (!dataset.is_split()) throw ValidationError("dataset has not been split");
  DatasetManifest m;
  m.window = dataset.window_length();
  m.horizon = dataset.horizon();
  m.stride = dataset.stride();
  m.fractions = dataset.fractions();
  m.gap = dataset.gap();
  for (std::size_t s = 0; s < dataset.sources().size(); ++s) {
    const auto& tr = *dataset.sources()[s];
    m.sources.push_back({tr.channel_id(), tr.size(), trace_hash(tr), dataset.layouts()[s]});
  }
  return m;
}

WindowedDataset apply_manifest(const DatasetManifest& manifest,
                               std::vector<std::shared_ptr<const OutcomeTrace>> traces) {
  if (traces.size() != manifest.sources.size()) {
    throw ValidationError("manifest lists " + std::to_string(manifest.sources.size()) + " traces, got " +
                          std::to_string(traces.size()));
  }
  std::vector<WindowedDataset> parts;
  for (std::size_t s = 0; s < traces.size(); ++s) {
    const auto& src = manifest.sources[s];
    if (trace_hash(*traces[s]) != src.sha256) {
      throw ValidationError("trace " + std::to_string(s) + " does not match the manifest hash");
    }
    auto split = split_chronological(make_windows(traces[s], manifest.window, manifest.horizon, manifest.stride),
                                     manifest.fractions);
    if (!(split.layouts().front() == src.layout) || split.gap() != manifest.gap) {
      throw ValidationError("rebuilt split of trace " + std::to_string(s) + " differs from the manifest");
    }
    parts.push_back(std::move(split));
  }
  return concat_datasets(parts);
}

}  // namespace fdr
