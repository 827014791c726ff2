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

#include "fdr/alloc_stats.hpp"

#include <atomic>

namespace fdr::alloc {
namespace {

std::atomic<bool> g_active{false};
std::atomic<std::size_t> g_current{0};
std::atomic<std::size_t> g_peak{0};
std::atomic<double> g_sample_sum{0.0};
std::atomic<std::size_t> g_sample_count{0};

}  // namespace

bool tracking_active() noexcept { return g_active.load(std::memory_order_relaxed); }
std::size_t current_bytes() noexcept { return g_current.load(std::memory_order_relaxed); }
std::size_t peak_bytes() noexcept { return g_peak.load(std::memory_order_relaxed); }

void reset_peak() noexcept { g_peak.store(g_current.load(std::memory_order_relaxed), std::memory_order_relaxed); }

double mean_sampled_bytes() noexcept {
  std::size_t n = g_sample_count.load(std::memory_order_relaxed);
  return n == 0 ? 0.0 : g_sample_sum.load(std::memory_order_relaxed) / static_cast<double>(n);
}

void reset_samples() noexcept {
  g_sample_sum.store(0.0, std::memory_order_relaxed);
  g_sample_count.store(0, std::memory_order_relaxed);
}

void mark_active() noexcept { g_active.store(true, std::memory_order_relaxed); }

void on_allocate(std::size_t bytes) noexcept {
  std::size_t now = g_current.fetch_add(bytes, std::memory_order_relaxed) + bytes;
  std::size_t peak = g_peak.load(std::memory_order_relaxed);
  while (now > peak && !g_peak.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
  double sum = g_sample_sum.load(std::memory_order_relaxed);
  while (!g_sample_sum.compare_exchange_weak(sum, sum + static_cast<double>(now), std::memory_order_relaxed)) {
  }
  g_sample_count.fetch_add(1, std::memory_order_relaxed);
}

void on_release(std::size_t bytes) noexcept { g_current.fetch_sub(bytes, std::memory_order_relaxed); }

}  // namespace fdr::alloc
