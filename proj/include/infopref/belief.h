// Copyright 2026 The Authors.
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

// Posterior over reward parameters given answered queries, approximated by
// Metropolis-Hastings samples. The prior is uniform on the unit sphere, and
// in joint mode uniform on an interval for delta.

#ifndef INFOPREF_BELIEF_H_
#define INFOPREF_BELIEF_H_

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "infopref/choice_model.h"
#include "infopref/environment.h"
#include "infopref/types.h"

namespace infopref {

struct HistoryEntry {
  Query query;
  QueryResponse response;
};

class InteractionHistory {
 public:
  InteractionHistory() = default;

  // Fails if the response is not a valid answer to the query.
  void Append(Query query, QueryResponse response);

  const std::vector<HistoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<HistoryEntry> entries_;
};

struct SamplerConfig {
  int feature_dim = 0;    // d; needed when the history is empty
  int num_samples = 100;  // M
  int burn_in = 2000;
  int thinning = 20;  // steps between kept samples; 0 keeps every step
  double proposal_scale = 0.1;
  double delta_proposal_scale = 0.2;
  std::uint64_t seed = 0;
  // Joint mode samples (omega, delta); beta stays at model.beta.
  bool joint = false;
  Interval delta_prior{0.0, 3.0};
  // Human model used for every likelihood in plain mode.
  HumanModelParams model{kDefaultWeakDelta, kDefaultBeta};

  void Validate() const;
  // feature_dim and seed are runtime values and not serialized.
  nlohmann::json ToJson() const;
  // Missing keys keep the values from `base`.
  static SamplerConfig FromJson(const nlohmann::json& j,
                                const SamplerConfig& base);
  static SamplerConfig FromJson(const nlohmann::json& j) {
    return FromJson(j, SamplerConfig{});
  }
};

// Sum of log-likelihoods of the history (uniform prior contributes 0).
// -inf when some answer has zero probability.
double LogPosterior(const RewardParams& omega, const HumanModelParams& params,
                    const InteractionHistory& history);

// M samples from the posterior, each omega projected onto the unit sphere.
// Deterministic given config.seed.
BeliefEnsemble SampleBelief(const SamplerConfig& config,
                            const InteractionHistory& history);

// Mean cosine similarity between the samples and `truth`.
double Alignment(const BeliefEnsemble& belief, std::span<const double> truth);
double Alignment(const BeliefEnsemble& belief, const RewardParams& truth);

// Unnormalized sample mean of omega.
std::vector<double> MeanOmega(const BeliefEnsemble& belief);

}  // namespace infopref

#endif  // INFOPREF_BELIEF_H_
