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

// Heap accounting fed by the optional operator new/delete replacement in
// alloc_hook.cpp. Without the hook linked in, `alloc_tracking_active()` is
// false and all counters stay at zero.
namespace fdr::alloc {

bool tracking_active() noexcept;
std::size_t current_bytes() noexcept;
std::size_t peak_bytes() noexcept;
/// Resets the high-water mark to the current live byte count.
void reset_peak() noexcept;

/// Running mean of the live byte count, sampled at every allocation since the
/// last reset_samples(). Zero when nothing was allocated.
double mean_sampled_bytes() noexcept;
void reset_samples() noexcept;

// Called from the hook only.
void mark_active() noexcept;
void on_allocate(std::size_t bytes) noexcept;
void on_release(std::size_t bytes) noexcept;

}  // namespace fdr::alloc
