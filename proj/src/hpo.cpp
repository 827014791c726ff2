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

#include "fdr/hpo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "fdr/eval.hpp"
#include "fdr/util.hpp"

namespace fdr {

using nlohmann::json;

double validation_objective(const Model& model, const WindowedDataset& data) {
  return sum_squared_error(model, data, Split::Val);
}

double validation_objective_mean(const Model& model, const WindowedDataset& data) {
  return validation_objective(model, data) / static_cast<double>(data.count(Split::Val));
}

double epoch_avg_loss(std::span<const double> losses) {
  if (losses.size() <= kWarmupEpochs) {
    throw ValidationError("epoch-averaged loss needs at least " + std::to_string(kWarmupEpochs + 1) +
                          " epochs, got " + std::to_string(losses.size()));
  }
  double s = 0.0;
  for (std::size_t t = kWarmupEpochs; t < losses.size(); ++t) s += losses[t];
  return s / static_cast<double>(losses.size() - kWarmupEpochs);
}

void finalize(TrialRecord& trial) {
  if (trial.error.empty() && trial.val_losses.size() > kWarmupEpochs) {
    trial.avg_loss = epoch_avg_loss(trial.val_losses);
  } else {
    trial.avg_loss.reset();
  }
}

namespace {

// (objective, parameter count, id) lexicographic.
bool better(double obj_a, std::size_t params_a, std::size_t id_a, double obj_b, std::size_t params_b,
            std::size_t id_b) {
  if (obj_a != obj_b) return obj_a < obj_b;
  if (params_a != params_b) return params_a < params_b;
  return id_a < id_b;
}

}  // namespace

std::size_t select_best_single(std::span<const TrialRecord> trials) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < trials.size(); ++k) {
    if (!trials[k].valid()) continue;
    if (!best || better(*trials[k].avg_loss, trials[k].parameter_count, k, *trials[*best].avg_loss,
                        trials[*best].parameter_count, *best)) {
      best = k;
    }
  }
  if (!best) throw ValidationError("no valid trials to select from");
  return *best;
}

std::size_t select_best_multichannel(std::span<const Candidate> candidates, std::span<const std::string> channels) {
  if (channels.empty()) throw ValidationError("no channels given");
  std::optional<std::size_t> best;
  double best_obj = 0.0;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    double sum = 0.0;
    bool complete = true;
    for (const auto& ch : channels) {
      auto it = c.per_channel.find(ch);
      if (it == c.per_channel.end()) {
        warn("candidate " + std::to_string(c.id) + " has no trial on channel " + ch + "; excluded");
        complete = false;
        break;
      }
      sum += it->second;
    }
    if (!complete) continue;
    double obj = sum / static_cast<double>(channels.size());
    if (!best || better(obj, c.parameter_count, k, best_obj, candidates[*best].parameter_count, *best)) {
      best = k;
      best_obj = obj;
    }
  }
  if (!best) throw ValidationError("no candidate has trials on every channel");
  return *best;
}

// --- search space --------------------------------------------------------------

namespace {

template <typename T>
std::size_t dim(const std::vector<T>& v) {
  return v.empty() ? 1 : v.size();
}

}  // namespace

std::size_t SearchSpace::cardinality() const {
  return dim(filters) * dim(kernel_sizes) * dim(lstm_units) * dim(dense_units) * dim(learning_rates) *
         dim(batch_sizes) * dim(epochs);
}

ModelConfig SearchSpace::at(std::size_t flat) const {
  if (flat >= cardinality()) throw RangeError("search-space index out of range");
  ModelConfig c = base;
  auto pick = [&flat](const auto& values, auto& field) {
    std::size_t n = dim(values);
    if (!values.empty()) field = values[flat % n];
    flat /= n;
  };
  pick(filters, c.filters);
  pick(kernel_sizes, c.kernel_size);
  pick(lstm_units, c.lstm_units);
  pick(dense_units, c.dense_units);
  pick(learning_rates, c.lr0);
  pick(batch_sizes, c.batch_size);
  pick(epochs, c.epochs);
  return c;
}

SearchSpace SearchSpace::around(const ModelConfig& base) {
  SearchSpace s;
  s.base = base;
  s.learning_rates = {0.02, 0.01, 0.005};
  if (base.kind == ModelKind::Cnn) {
    std::size_t f = base.filters;
    s.filters = {std::max<std::size_t>(1, f / 2), f, 2 * f};
    s.kernel_sizes = {3, 5};
  } else {
    s.lstm_units = {{25}, {50}};
    if (base.lstm_units.size() == 2) s.lstm_units.push_back(base.lstm_units);
  }
  return s;
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw ValidationError("box stats of an empty series");
  BoxStats b;
  b.min = percentile(values, 0);
  b.q1 = percentile(values, 25);
  b.median = percentile(values, 50);
  b.q3 = percentile(values, 75);
  b.max = percentile(values, 100);
  b.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return b;
}

SearchResult search(const SearchSpace& space, std::span<const LabeledDataset> datasets,
                    const SearchOptions& options) {
  if (options.budget == 0) throw ValidationError("search budget must be at least 1");
  if (datasets.empty()) throw ValidationError("search needs at least one dataset");
  for (const auto& d : datasets) {
    if (!d.data) throw ValidationError("null dataset");
  }

  // Distinct configurations, drawn by a partial Fisher-Yates over the space.
  const std::size_t card = space.cardinality();
  const std::size_t count = std::min(options.budget, card);
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> picks;
  if (card <= 1'000'000) {
    std::vector<std::size_t> pool(card);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng() % (card - i));
      std::swap(pool[i], pool[j]);
      picks.push_back(pool[i]);
    }
  } else {
    std::set<std::size_t> seen;
    while (picks.size() < count) {
      std::size_t v = static_cast<std::size_t>(rng() % card);
      if (seen.insert(v).second) picks.push_back(v);
    }
  }

  SearchResult result;
  result.trials.resize(picks.size() * datasets.size());
  for (std::size_t c = 0; c < picks.size(); ++c) {
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      auto& t = result.trials[c * datasets.size() + d];
      t.trial_id = c * datasets.size() + d;
      t.config = space.at(picks[c]);
      t.channel = datasets[d].channel;
    }
  }

  auto run_trial = [&](std::size_t k) {
    auto& t = result.trials[k];
    const WindowedDataset& data = *datasets[k % datasets.size()].data;
    try {
      // J-bar averages the whole epoch range, so search trials always run
      // the full N_tau epochs.
      ModelConfig cfg = t.config;
      cfg.early_stopping = false;
      Model model = build_model(cfg);
      t.parameter_count = model.parameter_count();
      auto trained = fit(std::move(model), data);
      for (const auto& h : trained.history) {
        t.val_losses.push_back(h.val_loss);
        t.lrs.push_back(h.lr);
      }
      t.val_size = static_cast<double>(data.count(Split::Val));
    } catch (const std::exception& e) {
      t.error = e.what();
    }
    finalize(t);
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, result.trials.size()));
  if (jobs == 1) {
    for (std::size_t k = 0; k < result.trials.size(); ++k) run_trial(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t k; (k = next.fetch_add(1)) < result.trials.size();) run_trial(k);
      });
    }
    for (auto& w : workers) w.join();
  }

  // Deterministic sequential reduction.
  std::vector<Candidate> candidates;
  std::vector<std::string> channels;
  for (const auto& d : datasets) channels.push_back(d.channel);
  for (std::size_t c = 0; c < picks.size(); ++c) {
    Candidate cand{c, 0, {}};
    RankedCandidate rc;
    rc.candidate_id = c;
    std::vector<double> all_losses;
    bool ok = true;
    double mean_sum = 0.0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      const auto& t = result.trials[c * datasets.size() + d];
      rc.config = t.config;
      cand.parameter_count = t.parameter_count;
      all_losses.insert(all_losses.end(), t.val_losses.begin(), t.val_losses.end());
      if (!t.valid()) {
        ok = false;
        continue;
      }
      cand.per_channel[t.channel] = *t.avg_loss;
      mean_sum += *t.avg_loss / t.val_size;
    }
    if (!ok) continue;
    rc.parameter_count = cand.parameter_count;
    double sum = 0.0;
    for (const auto& ch : channels) sum += cand.per_channel.at(ch);
    rc.objective = sum / static_cast<double>(datasets.size());
    rc.objective_mean = mean_sum / static_cast<double>(datasets.size());
    rc.box = box_stats(all_losses);
    candidates.push_back(std::move(cand));
    result.ranking.push_back(std::move(rc));
  }
  if (result.ranking.empty()) {
    throw SearchError("no trial completed the six epochs the objective needs", std::move(result.trials));
  }
  std::sort(result.ranking.begin(), result.ranking.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    return better(a.objective, a.parameter_count, a.candidate_id, b.objective, b.parameter_count, b.candidate_id);
  });
  std::size_t best = select_best_multichannel(candidates, channels);
  result.best = result.ranking.front().config;
  if (candidates[best].id != result.ranking.front().candidate_id) {
    throw Error("internal: ranking and multichannel selection disagree");
  }
  return result;
}

std::string trial_ledger_csv(std::span<const TrialRecord> trials) {
  std::string out = "trial_id,channel,epoch,val_loss,lr\n";
  for (const auto& t : trials) {
    for (std::size_t e = 0; e < t.val_losses.size(); ++e) {
      out += std::to_string(t.trial_id) + "," + t.channel + "," + std::to_string(e + 1) + "," +
             format_double(t.val_losses[e]) + "," + format_double(t.lrs.at(e)) + "\n";
    }
  }
  return out;
}

std::string search_summary_json(const SearchResult& result) {
  json j;
  j["ranking"] = json::array();
  for (std::size_t r = 0; r < result.ranking.size(); ++r) {
    const auto& c = result.ranking[r];
    j["ranking"].push_back({{"rank", r + 1},
                            {"candidate_id", c.candidate_id},
                            {"objective_sum", c.objective},
                            {"objective_mean", c.objective_mean},
                            {"parameter_count", c.parameter_count},
                            {"config", json::parse(c.config.to_json())}});
  }
  j["trials"] = json::array();
  for (const auto& t : result.trials) {
    json tj{{"trial_id", t.trial_id}, {"channel", t.channel}, {"epochs_run", t.val_losses.size()}};
    tj["avg_loss"] = t.avg_loss ? json(*t.avg_loss) : json(nullptr);
    if (!t.error.empty()) tj["error"] = t.error;
    j["trials"].push_back(tj);
  }
  j["best"] = json::parse(result.best.to_json());
  return j.dump(2);
}

std::string box_plot_csv(const SearchResult& result) {
  std::string out = "candidate_id,rank,min,q1,median,q3,max,mean\n";
  for (std::size_t r = 0; r < result.ranking.size(); ++r) {
    const auto& c = result.ranking[r];
    out += std::to_string(c.candidate_id) + "," + std::to_string(r + 1) + "," + format_double(c.box.min) + "," +
           format_double(c.box.q1) + "," + format_double(c.box.median) + "," + format_double(c.box.q3) + "," +
           format_double(c.box.max) + "," + format_double(c.box.mean) + "\n";
  }
  return out;
}

}  // namespace fdr
