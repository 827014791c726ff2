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

#include "fdr/nn/checkpoint.hpp"

#include <cstring>

#include <json.hpp>

#include "fdr/error.hpp"
#include "fdr/util.hpp"

namespace fdr::nn {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'F', 'D', 'R', 'M'};
constexpr std::uint32_t kVersion = 1;

json spec_json(const LayerSpec& s) {
  json j{{"kind", to_string(s.kind)}};
  switch (s.kind) {
    case LayerKind::Conv1D:
      j["filters"] = s.units;
      j["kernel_size"] = s.kernel_size;
      j["activation"] = to_string(s.activation);
      break;
    case LayerKind::MaxPool1D: j["pool_size"] = s.pool_size; break;
    case LayerKind::Flatten: break;
    case LayerKind::Dense:
      j["units"] = s.units;
      j["activation"] = to_string(s.activation);
      break;
    case LayerKind::Lstm:
    case LayerKind::BiLstm:
      j["units"] = s.units;
      j["return_sequences"] = s.return_sequences;
      break;
  }
  return j;
}

LayerSpec spec_from(const json& j) {
  LayerKind kind = layer_kind_from(j.at("kind").get<std::string>());
  switch (kind) {
    case LayerKind::Conv1D:
      return LayerSpec::conv1d(j.at("filters").get<Index>(), j.at("kernel_size").get<Index>(),
                               activation_from(j.at("activation").get<std::string>()));
    case LayerKind::MaxPool1D: return LayerSpec::maxpool1d(j.at("pool_size").get<Index>());
    case LayerKind::Flatten: return LayerSpec::flatten();
    case LayerKind::Dense:
      return LayerSpec::dense(j.at("units").get<Index>(), activation_from(j.at("activation").get<std::string>()));
    case LayerKind::Lstm: return LayerSpec::lstm(j.at("units").get<Index>(), j.at("return_sequences").get<bool>());
    case LayerKind::BiLstm:
      return LayerSpec::bilstm(j.at("units").get<Index>(), j.at("return_sequences").get<bool>());
  }
  throw ValidationError("unknown layer kind");
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Network& network, const std::string& metadata_json) {
  json header;
  header["input"] = {network.input_shape().steps, network.input_shape().features};
  header["layers"] = json::array();
  for (const auto& s : network.specs()) header["layers"].push_back(spec_json(s));
  header["tensors"] = json::array();
  auto names = network.parameter_names();
  auto params = network.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    header["tensors"].push_back({{"name", names[i]}, {"shape", {params[i]->rows(), params[i]->cols()}}});
  }
  header["metadata"] = json::parse(metadata_json);
  std::string text = header.dump();

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, kVersion);
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.reserve(out.size() + 8 * network.parameter_count());
  for (const Tensor* p : params) {
    for (Index r = 0; r < p->rows(); ++r) {
      for (Index c = 0; c < p->cols(); ++c) put_f64(out, (*p)(r, c));
    }
  }
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a model checkpoint");
  if (get_u32(bytes, 4) != kVersion) throw FormatError("unsupported checkpoint version");
  std::uint64_t header_len = get_u64(bytes, 8);
  if (header_len > bytes.size() - 16) throw FormatError("truncated checkpoint header");

  json header;
  try {
    header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }

  try {
    Shape input{header.at("input").at(0).get<Index>(), header.at("input").at(1).get<Index>()};
    std::vector<LayerSpec> specs;
    for (const auto& l : header.at("layers")) specs.push_back(spec_from(l));
    Network net(input, specs);

    auto params = net.parameters();
    const auto& tensors = header.at("tensors");
    if (tensors.size() != params.size()) throw FormatError("checkpoint tensor count does not match its layers");
    std::size_t offset = 16 + header_len;
    for (std::size_t i = 0; i < params.size(); ++i) {
      Index rows = tensors[i].at("shape").at(0).get<Index>();
      Index cols = tensors[i].at("shape").at(1).get<Index>();
      if (rows != params[i]->rows() || cols != params[i]->cols()) {
        throw FormatError("checkpoint tensor " + tensors[i].at("name").get<std::string>() + " has the wrong shape");
      }
      std::size_t need = static_cast<std::size_t>(rows * cols) * 8;
      if (bytes.size() - offset < need) throw FormatError("truncated checkpoint payload");
      for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
          (*params[i])(r, c) = get_f64(bytes, offset);
          offset += 8;
        }
      }
    }
    if (offset != bytes.size()) throw FormatError("trailing bytes after checkpoint payload");
    return {std::move(net), header.at("metadata").dump()};
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Network& network, const std::string& metadata_json) {
  write_file_bytes(path, encode_checkpoint(network, metadata_json));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

}  // namespace fdr::nn
