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

// Human answer model. Strict queries follow a softmax over beta * R(xi);
// weak queries use the minimum-perceivable-difference model
//
//   P(xi_k)  = 1 / (1 + exp(delta + beta (R(xi_k') - R(xi_k))))
//   P(equal) = (exp(2 delta) - 1) P(xi_1) P(xi_2)
//
// which sums to one exactly and reduces to the strict model at delta = 0.

#ifndef INFOPREF_CHOICE_MODEL_H_
#define INFOPREF_CHOICE_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "infopref/random.h"
#include "infopref/types.h"

namespace infopref {

inline constexpr double kDefaultBeta = 1.0;
inline constexpr double kDefaultWeakDelta = 1.0;

// Probabilities over a query's answers, indexed by
// QueryResponse::AnswerIndex: options first, then "about equal" if weak.
class ChoiceDistribution {
 public:
  ChoiceDistribution(std::vector<double> probs, int num_options, bool weak);

  std::span<const double> probs() const { return probs_; }
  double Probability(const QueryResponse& response) const;
  int num_options() const { return num_options_; }
  bool weak() const { return weak_; }

 private:
  std::vector<double> probs_;
  int num_options_;
  bool weak_;
};

// Kernels on raw rewards; these are what the samplers and scorers call in
// their inner loops. Outputs are natural-log probabilities computed without
// forming the probabilities first, so they never underflow to -inf except
// for the "about equal" answer at delta = 0.
void StrictLogProbs(std::span<const double> rewards, double beta,
                    std::span<double> log_probs);
void WeakLogProbs(double reward_1, double reward_2,
                  const HumanModelParams& params, std::span<double> log_probs);

ChoiceDistribution StrictProbs(const Query& query, const RewardParams& omega,
                               double beta = kDefaultBeta);
ChoiceDistribution WeakProbs(const Query& query, const RewardParams& omega,
                             const HumanModelParams& params);
// StrictProbs or WeakProbs depending on query.weak().
ChoiceDistribution AnswerProbs(const Query& query, const RewardParams& omega,
                               const HumanModelParams& params);

QueryResponse SampleResponse(const ChoiceDistribution& dist, Rng& rng);
QueryResponse SampleResponse(const ChoiceDistribution& dist,
                             std::uint64_t seed);

// ln P(response | query, omega, params). Fails for "about equal" on a
// strict query.
double LogLikelihood(const QueryResponse& response, const Query& query,
                     const RewardParams& omega, const HumanModelParams& params);

}  // namespace infopref

#endif  // INFOPREF_CHOICE_MODEL_H_
