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
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fdr/trace.hpp"

namespace fdr::testing {

inline std::vector<std::uint8_t> random_bits(std::mt19937_64& rng, std::size_t n, double p1 = 0.5) {
  std::bernoulli_distribution d(p1);
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = d(rng) ? 1 : 0;
  return bits;
}

inline std::shared_ptr<const OutcomeTrace> random_trace(std::mt19937_64& rng, std::size_t n, double p1 = 0.5,
                                                        std::uint32_t channel = 0) {
  return std::make_shared<const OutcomeTrace>(random_bits(rng, n, p1), channel, 0.5);
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("fdr_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fdr::testing

#include "fdr/error.hpp"

namespace fdr::testing {

/// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() {
    previous_ = set_warning_handler([this](std::string_view msg) { messages.emplace_back(msg); });
  }
  ~WarningCapture() { set_warning_handler(previous_); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  std::vector<std::string> messages;

 private:
  WarningHandler previous_;
};

}  // namespace fdr::testing

#include <algorithm>
#include <limits>

#include "fdr/dataset.hpp"

namespace fdr::testing {

/// Independent leakage oracle: per source, the raw trace indices touched by
/// each split (window start .. horizon end) must form ordered, disjoint
/// intervals train < val < test. Returns false on any overlap.
inline bool splits_are_disjoint(const WindowedDataset& data) {
  const std::size_t l = data.window_length(), h = data.horizon();
  for (std::uint32_t s = 0; s < data.sources().size(); ++s) {
    std::size_t lo[3], hi[3];
    bool seen[3] = {false, false, false};
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::numeric_limits<std::size_t>::max();
      hi[k] = 0;
    }
    for (const Example& e : data.examples()) {
      if (e.source != s) continue;
      int k = static_cast<int>(e.split);
      seen[k] = true;
      lo[k] = std::min(lo[k], e.index + 1 - l);
      hi[k] = std::max(hi[k], e.index + h);
    }
    int prev = -1;
    for (int k = 0; k < 3; ++k) {
      if (!seen[k]) continue;
      if (prev >= 0 && hi[prev] >= lo[k]) return false;
      prev = k;
    }
  }
  return true;
}

}  // namespace fdr::testing
