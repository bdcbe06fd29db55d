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

#include "infopref/choice_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "infopref/errors.h"

namespace infopref {
namespace {

// log(1 + exp(x)) without overflow.
inline double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

std::vector<double> OptionRewards(const Query& query, const RewardParams& omega) {
  std::vector<double> rewards;
  rewards.reserve(query.num_options());
  for (const auto& t : query.options()) rewards.push_back(Reward(omega, t));
  return rewards;
}

std::vector<double> Exponentiate(std::vector<double> log_probs) {
  for (double& v : log_probs) v = std::exp(v);
  return log_probs;
}

}  // namespace

ChoiceDistribution::ChoiceDistribution(std::vector<double> probs,
                                       int num_options, bool weak)
    : probs_(std::move(probs)), num_options_(num_options), weak_(weak) {
  Require(static_cast<int>(probs_.size()) == num_options_ + (weak_ ? 1 : 0),
          "choice distribution has the wrong support size");
  for (double p : probs_) {
    Require(p >= 0.0 && p <= 1.0, "probability outside [0, 1]");
  }
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  Require(std::abs(total - 1.0) <= 1e-9,
          "probabilities sum to " + std::to_string(total));
}

double ChoiceDistribution::Probability(const QueryResponse& response) const {
  Require(!response.about_equal() || weak_,
          "'about equal' is not an answer to a strict query");
  const int idx = response.AnswerIndex(num_options_);
  Require(idx < num_options_ + (weak_ ? 1 : 0), "response out of range");
  return probs_[idx];
}

void StrictLogProbs(std::span<const double> rewards, double beta,
                    std::span<double> log_probs) {
  if (rewards.size() == 2) {
    const double x = beta * (rewards[0] - rewards[1]);
    log_probs[0] = -Softplus(-x);
    log_probs[1] = -Softplus(x);
    return;
  }
  double top = -std::numeric_limits<double>::infinity();
  for (double r : rewards) top = std::max(top, beta * r);
  double total = 0.0;
  for (double r : rewards) total += std::exp(beta * r - top);
  const double lse = top + std::log(total);
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    log_probs[k] = beta * rewards[k] - lse;
  }
}

void WeakLogProbs(double reward_1, double reward_2,
                  const HumanModelParams& params, std::span<double> log_probs) {
  const double gap = params.beta * (reward_1 - reward_2);
  log_probs[0] = -Softplus(params.delta - gap);
  log_probs[1] = -Softplus(params.delta + gap);
  log_probs[2] = params.delta > 0.0
                     ? std::log(std::expm1(2.0 * params.delta)) + log_probs[0] +
                           log_probs[1]
                     : -std::numeric_limits<double>::infinity();
}

ChoiceDistribution StrictProbs(const Query& query, const RewardParams& omega,
                               double beta) {
  Require(!query.weak(), "StrictProbs called on a weak query");
  Require(beta > 0.0, "beta must be > 0");
  const auto rewards = OptionRewards(query, omega);
  std::vector<double> log_probs(rewards.size());
  StrictLogProbs(rewards, beta, log_probs);
  return ChoiceDistribution(Exponentiate(std::move(log_probs)),
                            query.num_options(), false);
}

ChoiceDistribution WeakProbs(const Query& query, const RewardParams& omega,
                             const HumanModelParams& params) {
  Require(query.weak(), "WeakProbs called on a strict query");
  params.Validate();
  const auto rewards = OptionRewards(query, omega);
  std::vector<double> log_probs(3);
  WeakLogProbs(rewards[0], rewards[1], params, log_probs);
  return ChoiceDistribution(Exponentiate(std::move(log_probs)), 2, true);
}

ChoiceDistribution AnswerProbs(const Query& query, const RewardParams& omega,
                               const HumanModelParams& params) {
  return query.weak() ? WeakProbs(query, omega, params)
                      : StrictProbs(query, omega, params.beta);
}

QueryResponse SampleResponse(const ChoiceDistribution& dist, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto probs = dist.probs();
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cumulative += probs[i];
    if (u < cumulative) {
      return QueryResponse::FromAnswerIndex(last_positive, dist.num_options());
    }
  }
  // Rounding left u just above the final cumulative sum.
  return QueryResponse::FromAnswerIndex(last_positive, dist.num_options());
}

QueryResponse SampleResponse(const ChoiceDistribution& dist,
                             std::uint64_t seed) {
  Rng rng(seed);
  return SampleResponse(dist, rng);
}

double LogLikelihood(const QueryResponse& response, const Query& query,
                     const RewardParams& omega, const HumanModelParams& params) {
  Require(response.ValidFor(query), "response is not valid for this query");
  const auto rewards = OptionRewards(query, omega);
  std::vector<double> log_probs(query.num_answers());
  if (query.weak()) {
    params.Validate();
    WeakLogProbs(rewards[0], rewards[1], params, log_probs);
  } else {
    Require(params.beta > 0.0, "beta must be > 0");
    StrictLogProbs(rewards, params.beta, log_probs);
  }
  return log_probs[response.AnswerIndex(query.num_options())];
}

}  // namespace infopref
