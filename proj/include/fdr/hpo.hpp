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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdr/dataset.hpp"
#include "fdr/error.hpp"
#include "fdr/models.hpp"

namespace fdr {

/// Sum over the validation split of (t_i - f(p_i))^2.
double validation_objective(const Model& model, const WindowedDataset& data);
/// The same quantity divided by |V|, comparable across split sizes.
double validation_objective_mean(const Model& model, const WindowedDataset& data);

/// Number of leading epochs excluded from the epoch-averaged objective.
inline constexpr std::size_t kWarmupEpochs = 5;

/// Mean of the per-epoch losses from epoch 6 onwards. Throws ValidationError
/// for fewer than six epochs, where the average is undefined.
double epoch_avg_loss(std::span<const double> losses_by_epoch);

struct TrialRecord {
  std::size_t trial_id = 0;
  ModelConfig config;
  std::string channel;               ///< "ch1", ..., or "all"
  std::vector<double> val_losses;    ///< J(M, theta, tau), tau = 1..
  std::vector<double> lrs;
  std::size_t parameter_count = 0;
  std::optional<double> avg_loss;    ///< J-bar; empty when < 6 epochs ran
  double val_size = 0.0;             ///< |V|, for the mean variant
  std::string error;                 ///< set when training failed

  bool valid() const { return avg_loss.has_value(); }
};

/// Fills avg_loss from val_losses when defined.
void finalize(TrialRecord& trial);

/// Index of the trial minimizing J-bar. Ties go to the smaller parameter
/// count, then the earlier trial. Invalid trials are skipped.
std::size_t select_best_single(std::span<const TrialRecord> trials);

struct Candidate {
  std::size_t id = 0;
  std::size_t parameter_count = 0;
  /// channel label -> J-bar on that channel's validation split
  std::map<std::string, double> per_channel;
};

/// Argmin over candidates of the mean J-bar across `channels`; candidates
/// missing a channel are excluded with a warning. Same tie rule as
/// select_best_single. Returns a position into `candidates`.
std::size_t select_best_multichannel(std::span<const Candidate> candidates, std::span<const std::string> channels);

/// Candidate values per hyperparameter. Empty lists keep the base config's value.
struct SearchSpace {
  ModelConfig base;
  std::vector<std::size_t> filters;
  std::vector<std::size_t> kernel_sizes;
  std::vector<std::vector<std::size_t>> lstm_units;
  std::vector<std::vector<std::size_t>> dense_units;
  std::vector<double> learning_rates;
  std::vector<std::size_t> batch_sizes;
  std::vector<std::size_t> epochs;

  std::size_t cardinality() const;
  ModelConfig at(std::size_t flat_index) const;

  /// Brackets the preset values around `base`.
  static SearchSpace around(const ModelConfig& base);
};

struct LabeledDataset {
  std::string channel;
  const WindowedDataset* data = nullptr;
};

struct BoxStats {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

struct RankedCandidate {
  std::size_t candidate_id = 0;
  ModelConfig config;
  std::size_t parameter_count = 0;
  double objective = 0.0;       ///< J-bar (channel mean when several channels)
  double objective_mean = 0.0;  ///< same, per validation example
  BoxStats box;                 ///< over all recorded J(M, theta, tau)
};

struct SearchResult {
  std::vector<TrialRecord> trials;    ///< one per (candidate, channel)
  std::vector<RankedCandidate> ranking;  ///< best first
  ModelConfig best;
};

/// Raised when no trial produced a usable objective; carries every record.
class SearchError : public Error {
 public:
  SearchError(const std::string& what, std::vector<TrialRecord> trials)
      : Error(what), trials_(std::move(trials)) {}
  const std::vector<TrialRecord>& trials() const noexcept { return trials_; }

 private:
  std::vector<TrialRecord> trials_;
};

struct SearchOptions {
  std::size_t budget = 8;
  std::uint64_t seed = 7;
  std::size_t jobs = 1;
};

/// Seeded random search: samples `budget` distinct configurations, trains
/// each on every dataset for its full epoch count (early stopping is not
/// applied to trials), ranks by J-bar (channel-averaged when several
/// datasets are given). Throws SearchError if no candidate is usable.
SearchResult search(const SearchSpace& space, std::span<const LabeledDataset> datasets,
                    const SearchOptions& options);

BoxStats box_stats(std::span<const double> values);

/// trial_id,channel,epoch,val_loss,lr
std::string trial_ledger_csv(std::span<const TrialRecord> trials);
/// Ranked summary as JSON.
std::string search_summary_json(const SearchResult& result);
/// candidate_id,rank,min,q1,median,q3,max,mean
std::string box_plot_csv(const SearchResult& result);

}  // namespace fdr
