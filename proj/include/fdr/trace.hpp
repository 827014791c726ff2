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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fdr {

/// Ordered binary transmission outcomes for one channel (1 = ACK received).
/// Immutable after construction; the constructor enforces the invariants.
class OutcomeTrace {
 public:
  OutcomeTrace(std::vector<std::uint8_t> outcomes, std::uint32_t channel_id = 0, double period_s = 0.5);

  std::span<const std::uint8_t> outcomes() const noexcept { return outcomes_; }
  std::uint8_t operator[](std::size_t i) const { return outcomes_[i]; }
  std::size_t size() const noexcept { return outcomes_.size(); }
  std::uint32_t channel_id() const noexcept { return channel_id_; }
  double period_s() const noexcept { return period_s_; }

  /// Fraction of successful outcomes.
  double success_ratio() const noexcept;

  friend bool operator==(const OutcomeTrace&, const OutcomeTrace&) = default;

 private:
  std::vector<std::uint8_t> outcomes_;
  std::uint32_t channel_id_;
  double period_s_;
};

OutcomeTrace concatenate(std::span<const OutcomeTrace> parts);

enum class ChannelState : std::uint8_t { Good = 0, Bad = 1 };

/// Slow sinusoidal modulation of both loss probabilities:
/// e(i) = clamp(e * (1 + amplitude * sin(2*pi*i / period_samples)), 0, 1).
struct LossDrift {
  double amplitude = 0.0;  ///< in [0, 1); 0 disables drift
  double period_samples = 0.0;

  bool enabled() const noexcept { return amplitude > 0.0; }
};

/// Two-state Gilbert-Elliott channel with optional loss-rate drift.
struct GEChannelSpec {
  double p_gb = 0.01;  ///< per-step Good -> Bad
  double p_bg = 0.04;  ///< per-step Bad -> Good
  double e_g = 0.05;   ///< loss probability in Good
  double e_b = 0.6;    ///< loss probability in Bad
  LossDrift drift{};
  std::uint64_t seed = 1;
  ChannelState initial_state = ChannelState::Good;
  std::uint32_t channel_id = 0;
  double period_s = 0.5;

  /// Throws ValidationError if any field is out of range.
  void validate() const;

  /// Loss probability of `state` at step `i`, drift applied and clamped.
  double loss_probability(ChannelState state, std::size_t i) const;
};

/// Default spec: stationary success ratio 0.84, matching the 85/15 outcome
/// balance of the measured dataset within tolerance.
GEChannelSpec calibrated_channel_spec();

/// Named presets "synth-ch1", "synth-ch5", "synth-ch9", "synth-ch13" with
/// increasing burstiness and drift. Throws ValidationError on unknown names.
GEChannelSpec channel_preset(std::string_view name);
std::vector<std::string> channel_preset_names();

struct SimulationResult {
  OutcomeTrace trace;
  std::vector<ChannelState> states;  ///< hidden state at each step
};

/// Runs the chain for `n` steps. Outcome i is drawn from the state at step i,
/// then the state transitions. Deterministic for a fixed spec (seed included).
SimulationResult simulate_channel(const GEChannelSpec& spec, std::size_t n);
OutcomeTrace simulate_trace(const GEChannelSpec& spec, std::size_t n);

/// pi_G * (1 - e_g) + pi_B * (1 - e_b) for a drift-free spec.
double stationary_fdr(const GEChannelSpec& spec);

struct TraceStats {
  double mean_fdr = 0.0;
  double std_fdr = 0.0;          ///< population std of per-window means
  std::size_t window_count = 0;  ///< disjoint full windows used for std_fdr
  std::map<std::size_t, std::size_t> zero_runs;  ///< run length -> count
  std::map<std::size_t, std::size_t> one_runs;
  std::size_t max_zero_run = 0;
  std::size_t max_one_run = 0;
};

TraceStats trace_stats(const OutcomeTrace& trace, std::size_t window = 3600);

// --- codecs -----------------------------------------------------------------

/// CSV with `# channel=`/`# period_s=` comment metadata and header
/// `idx,outcome[,rssi_dbm,latency_us]`. Extra columns are dropped with a warning.
OutcomeTrace parse_trace_text(std::string_view text);
std::string format_trace_text(const OutcomeTrace& trace);
OutcomeTrace load_trace_text(const std::filesystem::path& path);
void save_trace_text(const OutcomeTrace& trace, const std::filesystem::path& path);

inline constexpr std::size_t kPackedHeaderSize = 4 + 4 + 8 + 8;

/// "FDR1" | u32 channel | f64 period_s | u64 N | ceil(N/8) bytes, LSB-first.
std::vector<std::uint8_t> encode_packed(const OutcomeTrace& trace);
OutcomeTrace decode_packed(std::span<const std::uint8_t> bytes);
OutcomeTrace load_trace_packed(const std::filesystem::path& path);
void save_trace_packed(const OutcomeTrace& trace, const std::filesystem::path& path);

/// Reads either format, chosen by the leading magic bytes.
OutcomeTrace load_trace(const std::filesystem::path& path);

/// SHA-256 of the packed encoding; identifies a trace in manifests.
std::string trace_hash(const OutcomeTrace& trace);

}  // namespace fdr
