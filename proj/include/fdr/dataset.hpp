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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdr/trace.hpp"

namespace fdr {

/// Mean of the `horizon` outcomes strictly after index i:
/// (1/horizon) * sum_{j=i+1}^{i+horizon} x_j. Throws RangeError when the
/// horizon runs past the end of the trace.
double fdr_target(const OutcomeTrace& trace, std::size_t i, std::size_t horizon);

enum class Split : std::uint8_t { Train = 0, Val = 1, Test = 2 };

const char* split_name(Split s);

struct Example {
  std::uint32_t source = 0;  ///< index into WindowedDataset::sources()
  std::size_t index = 0;     ///< trace index i; the window ends here inclusive
  double target = 0.0;
  Split split = Split::Train;
};

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

/// Raw trace positions [first, last] of the examples in one split block of
/// one source, plus their count. Empty blocks have count == 0.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t count = 0;

  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct SourceLayout {
  std::size_t total_examples = 0;  ///< before splitting
  IndexRange train, val, test;

  const IndexRange& range(Split s) const;
  friend bool operator==(const SourceLayout&, const SourceLayout&) = default;
};

/// (window, FDR target) pairs over one or more traces. Windows are views into
/// the shared source traces; nothing is copied per example.
class WindowedDataset {
 public:
  WindowedDataset(std::vector<std::shared_ptr<const OutcomeTrace>> sources, std::size_t window,
                  std::size_t horizon, std::size_t stride, std::vector<Example> examples);

  std::size_t size() const noexcept { return examples_.size(); }
  bool empty() const noexcept { return examples_.empty(); }
  std::size_t window_length() const noexcept { return window_; }
  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t stride() const noexcept { return stride_; }

  const Example& operator[](std::size_t k) const { return examples_[k]; }
  std::span<const Example> examples() const noexcept { return examples_; }
  const std::vector<std::shared_ptr<const OutcomeTrace>>& sources() const noexcept { return sources_; }

  /// The `window_length()` outcomes ending at example k's index, inclusive.
  std::span<const std::uint8_t> window(std::size_t k) const;

  /// Positions (into examples()) of every example tagged `s`, in dataset order.
  std::vector<std::size_t> indices(Split s) const;
  std::size_t count(Split s) const;

  /// Guard gap (in examples) dropped at each split boundary; 0 if unsplit.
  std::size_t gap() const noexcept { return gap_; }
  const std::vector<SourceLayout>& layouts() const noexcept { return layouts_; }
  const SplitFractions& fractions() const noexcept { return fractions_; }
  bool is_split() const noexcept { return !layouts_.empty(); }

  /// Restricts to one source trace (used for per-channel test reports).
  WindowedDataset only_source(std::uint32_t source) const;

 private:
  friend WindowedDataset split_chronological(const WindowedDataset&, SplitFractions);
  friend WindowedDataset concat_datasets(std::span<const WindowedDataset>);
  friend WindowedDataset oversample_minority(const WindowedDataset&);

  std::vector<std::shared_ptr<const OutcomeTrace>> sources_;
  std::size_t window_, horizon_, stride_;
  std::vector<Example> examples_;
  std::size_t gap_ = 0;
  std::vector<SourceLayout> layouts_;
  SplitFractions fractions_{};
};

/// Examples at i = window-1, window-1+stride, ... while i + horizon <= N-1.
WindowedDataset make_windows(std::shared_ptr<const OutcomeTrace> trace, std::size_t window, std::size_t horizon,
                             std::size_t stride = 1);

/// Smallest per-boundary gap (in examples) such that no raw trace index feeds
/// examples on both sides of the boundary: (gap+1)*stride >= window + horizon.
std::size_t guard_gap(std::size_t window, std::size_t horizon, std::size_t stride);

/// Tags each source's examples train -> val -> test in time order, dropping
/// `guard_gap` examples at every boundary between two nonempty blocks.
WindowedDataset split_chronological(const WindowedDataset& dataset, SplitFractions fractions = {});

/// Union of datasets with equal window/horizon/stride (the "all" condition).
WindowedDataset concat_datasets(std::span<const WindowedDataset> parts);

/// Duplicates train examples whose latest outcome is the minority class until
/// both classes are (approximately) equally represented. Off by default in the
/// training pipeline.
WindowedDataset oversample_minority(const WindowedDataset& dataset);

struct ClassBalance {
  double p0 = 0.0;
  double p1 = 0.0;
};

ClassBalance class_balance(const OutcomeTrace& trace);

// --- manifest ----------------------------------------------------------------

struct DatasetManifest {
  std::size_t window = 0;
  std::size_t horizon = 0;
  std::size_t stride = 1;
  SplitFractions fractions{};
  std::size_t gap = 0;
  struct Source {
    std::uint32_t channel = 0;
    std::size_t length = 0;
    std::string sha256;
    SourceLayout layout;
  };
  std::vector<Source> sources;

  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text);

  bool operator==(const DatasetManifest&) const;
};

DatasetManifest describe(const WindowedDataset& split_dataset);

/// Rebuilds the split dataset from a manifest and the original traces (in
/// manifest order). Throws ValidationError on hash or layout mismatch.
WindowedDataset apply_manifest(const DatasetManifest& manifest,
                               std::vector<std::shared_ptr<const OutcomeTrace>> traces);

}  // namespace fdr
