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

#include "infopref/types.h"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "infopref/errors.h"

namespace infopref {

FeatureVector::FeatureVector(std::vector<double> values)
    : values_(std::move(values)) {
  for (double v : values_) Require(std::isfinite(v), "feature is not finite");
}

RewardParams::RewardParams(std::vector<double> omega) : omega_(std::move(omega)) {
  Require(!omega_.empty(), "reward parameters are empty");
  const double norm = std::sqrt(Dot(omega_, omega_));
  Require(std::abs(norm - 1.0) <= kNormTolerance,
          "reward parameters must have unit norm, got " + std::to_string(norm));
}

RewardParams RewardParams::FromDirection(std::vector<double> direction) {
  const double norm = std::sqrt(Dot(direction, direction));
  Require(norm > 0.0 && std::isfinite(norm),
          "cannot normalize a zero or non-finite direction");
  for (double& v : direction) v /= norm;
  return RewardParams(std::move(direction));
}

void HumanModelParams::Validate() const {
  Require(std::isfinite(delta) && delta >= 0.0, "delta must be >= 0");
  Require(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
}

Query::Query(std::vector<Trajectory> options, bool weak)
    : options_(std::move(options)), weak_(weak) {
  Require(options_.size() >= 2, "a query needs at least two options");
  Require(!weak_ || options_.size() == 2,
          "weak queries are only defined for K = 2");
  const auto& first = options_.front();
  Require(first.features.size() > 0, "query option has no features");
  for (const auto& t : options_) {
    Require(t.env_id == first.env_id, "query options mix environments");
    Require(t.features.size() == first.features.size(),
            "query options have different feature dimensions");
  }
}

Query Query::Trivial(const Trajectory& option, int k, bool weak) {
  Require(k >= 2, "a query needs at least two options");
  return Query(std::vector<Trajectory>(k, option), weak);
}

QueryResponse QueryResponse::Option(int index) {
  Require(index >= 0, "option index must be nonnegative");
  return QueryResponse(index, false);
}

QueryResponse QueryResponse::AboutEqual() { return QueryResponse(-1, true); }

QueryResponse QueryResponse::FromAnswerIndex(int answer, int num_options) {
  Require(answer >= 0 && answer <= num_options, "answer index out of range");
  return answer == num_options ? AboutEqual() : Option(answer);
}

int QueryResponse::option() const {
  Require(!about_equal_, "response is 'about equal', not an option");
  return index_;
}

bool QueryResponse::ValidFor(const Query& query) const {
  if (about_equal_) return query.weak();
  return index_ < query.num_options();
}

BeliefEnsemble::BeliefEnsemble(std::vector<BeliefSample> samples)
    : samples_(std::move(samples)) {
  Require(!samples_.empty(), "belief ensemble is empty");
  const bool joint = samples_.front().nu.has_value();
  const std::size_t d = samples_.front().omega.dim();
  for (const auto& s : samples_) {
    Require(s.nu.has_value() == joint,
            "belief samples mix joint and plain entries");
    Require(s.omega.dim() == d, "belief samples have different dimensions");
    if (s.nu) s.nu->Validate();
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), "dimension mismatch: " +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()));
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double Reward(const RewardParams& omega, const FeatureVector& features) {
  return Dot(omega.omega(), features.values());
}

double Reward(const RewardParams& omega, const Trajectory& trajectory) {
  return Reward(omega, trajectory.features);
}

}  // namespace infopref
