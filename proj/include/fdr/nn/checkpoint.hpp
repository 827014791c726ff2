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
#include <span>
#include <string>
#include <vector>

#include "fdr/nn/network.hpp"

namespace fdr::nn {

/// Self-describing model checkpoint:
///   "FDRM" | u32 version | u64 header length | JSON header | f64 payload
/// The header lists the input shape, every LayerSpec, each parameter's name
/// and shape, and a free-form `metadata` object. The payload holds parameter
/// values row-major, little-endian, in header order.
struct Checkpoint {
  Network network;
  std::string metadata_json = "{}";
};

std::vector<std::uint8_t> encode_checkpoint(const Network& network, const std::string& metadata_json = "{}");
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Network& network,
                     const std::string& metadata_json = "{}");
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace fdr::nn
