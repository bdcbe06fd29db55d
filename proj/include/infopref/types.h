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

// Shared domain types: features, reward parameters, trajectories, queries,
// responses and belief samples. All of them are immutable values once built.

#ifndef INFOPREF_TYPES_H_
#define INFOPREF_TYPES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace infopref {

// Dense row-major matrix used for action and state sequences.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Normalized trajectory features Phi(xi). Entries are always finite.
class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<double> values_;
};

// Linear reward weights omega, constrained to the unit sphere.
class RewardParams {
 public:
  static constexpr double kNormTolerance = 1e-9;

  // Validates that `omega` already has unit norm.
  explicit RewardParams(std::vector<double> omega);
  // Rescales an arbitrary nonzero direction onto the sphere.
  static RewardParams FromDirection(std::vector<double> direction);

  std::span<const double> omega() const { return omega_; }
  std::size_t dim() const { return omega_.size(); }

  friend bool operator==(const RewardParams&, const RewardParams&) = default;

 private:
  std::vector<double> omega_;
};

// Parameters nu of the human answer model.
struct HumanModelParams {
  double delta = 0.0;  // minimum perceivable reward difference
  double beta = 1.0;   // rationality temperature

  void Validate() const;
  friend bool operator==(const HumanModelParams&,
                         const HumanModelParams&) = default;
};

struct Trajectory {
  std::string env_id;
  Matrix actions;  // epochs x action_dim
  Matrix states;   // timesteps x state_dim; may be empty for synthetic data
  FeatureVector features;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// K trajectories shown together. A weak query adds the "about equal"
// answer and is only defined for K = 2.
class Query {
 public:
  Query(std::vector<Trajectory> options, bool weak);

  // K copies of the same trajectory.
  static Query Trivial(const Trajectory& option, int k, bool weak = false);

  const std::vector<Trajectory>& options() const { return options_; }
  const Trajectory& option(int k) const { return options_[k]; }
  int num_options() const { return static_cast<int>(options_.size()); }
  // Options plus the "about equal" answer when weak.
  int num_answers() const { return num_options() + (weak_ ? 1 : 0); }
  bool weak() const { return weak_; }
  std::size_t feature_dim() const { return options_[0].features.size(); }

 private:
  std::vector<Trajectory> options_;
  bool weak_;
};

class QueryResponse {
 public:
  static QueryResponse Option(int index);
  static QueryResponse AboutEqual();
  // Inverse of AnswerIndex.
  static QueryResponse FromAnswerIndex(int answer, int num_options);

  bool about_equal() const { return about_equal_; }
  int option() const;
  // Column of this response in a choice table: options first, then Υ.
  int AnswerIndex(int num_options) const {
    return about_equal_ ? num_options : index_;
  }
  bool ValidFor(const Query& query) const;

  friend bool operator==(const QueryResponse&, const QueryResponse&) = default;

 private:
  QueryResponse(int index, bool about_equal)
      : index_(index), about_equal_(about_equal) {}

  int index_;
  bool about_equal_;
};

struct BeliefSample {
  RewardParams omega;
  std::optional<HumanModelParams> nu;

  friend bool operator==(const BeliefSample&, const BeliefSample&) = default;
};

// M posterior samples. Either every sample carries nu (joint mode) or none
// does (plain mode).
class BeliefEnsemble {
 public:
  explicit BeliefEnsemble(std::vector<BeliefSample> samples);

  const std::vector<BeliefSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  std::size_t dim() const { return samples_.front().omega.dim(); }
  bool joint() const { return samples_.front().nu.has_value(); }

  friend bool operator==(const BeliefEnsemble&,
                         const BeliefEnsemble&) = default;

 private:
  std::vector<BeliefSample> samples_;
};

double Dot(std::span<const double> a, std::span<const double> b);

// R(xi) = omega . Phi(xi).
double Reward(const RewardParams& omega, const FeatureVector& features);
double Reward(const RewardParams& omega, const Trajectory& trajectory);

}  // namespace infopref

#endif  // INFOPREF_TYPES_H_
