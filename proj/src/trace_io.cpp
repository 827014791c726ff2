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

#include <algorithm>
#include <charconv>
#include <cstring>

#include "fdr/error.hpp"
#include "fdr/trace.hpp"
#include "fdr/util.hpp"

namespace fdr {
namespace {

constexpr char kMagic[4] = {'F', 'D', 'R', '1'};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && end == s.data() + s.size();
}

}  // namespace

OutcomeTrace parse_trace_text(std::string_view text) {
  std::uint32_t channel = 0;
  double period = 0.5;
  bool header_seen = false;
  std::size_t columns = 0;
  std::vector<std::uint8_t> outcomes;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;

    if (line.front() == '#') {
      if (header_seen) throw ParseError("metadata comment after header", line_no);
      std::string_view body = trim(line.substr(1));
      std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) continue;  // free-form comment
      std::string_view key = trim(body.substr(0, eq));
      std::string_view value = trim(body.substr(eq + 1));
      if (key == "channel") {
        if (!parse_int(value, channel)) throw ParseError("bad channel id '" + std::string(value) + "'", line_no);
      } else if (key == "period_s") {
        try {
          period = parse_double(value);
        } catch (const ValidationError&) {
          throw ParseError("bad period_s '" + std::string(value) + "'", line_no);
        }
        if (!(period > 0.0)) throw ParseError("period_s must be positive", line_no);
      }
      continue;
    }

    auto fields = split_commas(line);
    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "idx" || fields[1] != "outcome") {
        throw ParseError("expected header 'idx,outcome[,rssi_dbm,latency_us]'", line_no);
      }
      for (std::size_t c = 2; c < fields.size(); ++c) {
        if (fields[c] != "rssi_dbm" && fields[c] != "latency_us") {
          throw ParseError("unknown column '" + std::string(fields[c]) + "'", line_no);
        }
      }
      if (fields.size() > 2) warn("trace columns beyond idx,outcome are ignored");
      columns = fields.size();
      header_seen = true;
      continue;
    }

    if (fields.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    std::uint64_t idx = 0;
    if (!parse_int(fields[0], idx)) throw ParseError("bad index '" + std::string(fields[0]) + "'", line_no);
    if (idx != outcomes.size()) {
      throw ParseError("index " + std::to_string(idx) + " out of sequence (expected " +
                           std::to_string(outcomes.size()) + ")",
                       line_no);
    }
    if (fields[1] == "0") {
      outcomes.push_back(0);
    } else if (fields[1] == "1") {
      outcomes.push_back(1);
    } else {
      throw ParseError("outcome must be 0 or 1, got '" + std::string(fields[1]) + "'", line_no);
    }
  }

  if (!header_seen) throw ParseError("missing header", line_no + 1);
  if (outcomes.empty()) throw ParseError("trace has no samples", line_no + 1);
  return OutcomeTrace(std::move(outcomes), channel, period);
}

std::string format_trace_text(const OutcomeTrace& trace) {
  std::string out;
  out.reserve(trace.size() * 9 + 64);
  out += "# channel=" + std::to_string(trace.channel_id()) + "\n";
  out += "# period_s=" + format_double(trace.period_s()) + "\n";
  out += "idx,outcome\n";
  char buf[32];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, i);
    out.append(buf, end);
    out += trace[i] ? ",1\n" : ",0\n";
  }
  return out;
}

OutcomeTrace load_trace_text(const std::filesystem::path& path) { return parse_trace_text(read_file_text(path)); }

void save_trace_text(const OutcomeTrace& trace, const std::filesystem::path& path) {
  write_file_text(path, format_trace_text(trace));
}

std::vector<std::uint8_t> encode_packed(const OutcomeTrace& trace) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kPackedHeaderSize + (trace.size() + 7) / 8);
  put_u32(out, trace.channel_id());
  put_f64(out, trace.period_s());
  put_u64(out, trace.size());
  std::size_t payload_start = out.size();
  out.resize(payload_start + (trace.size() + 7) / 8, 0);
  auto x = trace.outcomes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[payload_start + i / 8] |= static_cast<std::uint8_t>(x[i] << (i % 8));
  }
  return out;
}

OutcomeTrace decode_packed(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPackedHeaderSize) throw FormatError("packed trace shorter than its header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic (expected FDR1)");
  std::uint32_t channel = get_u32(bytes, 4);
  double period = get_f64(bytes, 8);
  std::uint64_t n = get_u64(bytes, 16);
  if (n == 0) throw FormatError("packed trace declares zero samples");
  std::size_t payload = bytes.size() - kPackedHeaderSize;
  if (n > payload * 8ull) {
    throw FormatError("declared count " + std::to_string(n) + " exceeds payload of " + std::to_string(payload) +
                      " bytes");
  }
  if (payload != (n + 7) / 8) throw FormatError("payload size does not match declared count");
  if (!(period > 0.0)) throw FormatError("non-positive period_s in header");

  std::vector<std::uint8_t> outcomes(n);
  auto data = bytes.subspan(kPackedHeaderSize);
  for (std::size_t i = 0; i < n; ++i) outcomes[i] = (data[i / 8] >> (i % 8)) & 1u;
  return OutcomeTrace(std::move(outcomes), channel, period);
}

OutcomeTrace load_trace_packed(const std::filesystem::path& path) { return decode_packed(read_file_bytes(path)); }

void save_trace_packed(const OutcomeTrace& trace, const std::filesystem::path& path) {
  write_file_bytes(path, encode_packed(trace));
}

OutcomeTrace load_trace(const std::filesystem::path& path) {
  auto bytes = read_file_bytes(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) return decode_packed(bytes);
  return parse_trace_text(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string trace_hash(const OutcomeTrace& trace) { return sha256_hex(encode_packed(trace)); }

}  // namespace fdr
