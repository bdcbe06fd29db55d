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

// Simulated-user experiments: each user has a hidden reward and answers the
// queries the learner selects.

#ifndef INFOPREF_SIMULATION_H_
#define INFOPREF_SIMULATION_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infopref/belief.h"
#include "infopref/environment.h"
#include "infopref/query_selection.h"

namespace infopref {

enum class QueryType { kStrict, kWeak, kWeakUnknownDelta };

std::string QueryTypeName(QueryType type);
QueryType ParseQueryType(const std::string& name);

struct ExperimentConfig {
  nlohmann::json environment = {{"env_id", "lds"}};
  Objective objective = Objective::kInfoGain;
  QueryType query_type = QueryType::kStrict;
  int num_users = 30;
  int num_queries = 25;
  std::size_t pool_size = 20000;
  std::uint64_t pool_seed = 1;
  SamplerConfig sampler;  // feature_dim, seed and joint are set per run
  std::optional<CostSpec> cost;
  bool ablation_discard_equal = false;
  std::uint64_t rng_seed = 1;
  // Simulated users answer with this beta. Their delta is sampler.model.delta
  // for kWeak and uniform on user_delta_range for kWeakUnknownDelta.
  double user_beta = kDefaultBeta;
  Interval user_delta_range{0.0, 2.0};
  // Queries still asked (and recorded) after the stopping rule fires.
  int forced_after_stop = 0;
  int threads = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults.
  static ExperimentConfig FromJson(const nlohmann::json& j);
};

struct QueryRecord {
  int index = 0;  // 1-based query number
  std::size_t pool_index = 0;
  QueryResponse response = QueryResponse::Option(0);
  bool wrong_answer = false;
  double alignment = 0.0;  // after this response
  double info_gain = 0.0;  // of the asked query, before the response
  double cost = 0.0;
  double r_star = 0.0;  // only meaningful when a cost is configured
  bool after_stop = false;
};

struct UserResult {
  int user = 0;
  std::vector<double> true_omega;
  double true_delta = 0.0;
  double initial_alignment = 0.0;
  std::optional<int> stop_index;  // queries asked before the rule fired
  std::optional<double> stop_r_star;
  std::vector<QueryRecord> queries;

  double final_alignment() const;
  // Sum of (info_gain - cost) over the first `count` queries.
  double CumulativeReward(std::size_t count) const;
};

struct ExperimentResult {
  ExperimentConfig config;
  PoolManifest pool;
  std::vector<UserResult> users;
};

ExperimentResult RunExperiment(const ExperimentConfig& config);
// Same, reusing an already generated pool that matches the config.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const QueryPool& pool);

QueryPool BuildPool(const ExperimentConfig& config);

// Smallest 1-based i >= 3 with m_{i-2}, m_{i-1}, m_i inside a window of
// width `width`.
std::optional<int> FindPlateau(const std::vector<double>& alignments,
                               double width = 0.02);

struct EpsilonTuning {
  double epsilon = 0.0;
  std::vector<double> per_user;  // nan for excluded users
  std::vector<int> plateau;      // 0 for excluded users
  int excluded = 0;
};

// Runs with epsilon = 0 and records, per user, the epsilon that zeroes r* at
// the plateau query. Fails if every user is excluded.
EpsilonTuning TuneEpsilon(const ExperimentConfig& config);
EpsilonTuning TuneEpsilon(const ExperimentConfig& config, const QueryPool& pool);
EpsilonTuning TuneEpsilonFromResult(const ExperimentResult& result);

struct IndexSummary {
  int index = 0;
  int users = 0;
  double mean_alignment = 0.0;
  double se_alignment = 0.0;
  int wrong_answers = 0;
  int about_equal = 0;
};

struct ExperimentSummary {
  double initial_alignment = 0.0;
  double final_alignment = 0.0;
  double final_alignment_se = 0.0;
  int wrong_answers = 0;
  int about_equal = 0;
  int stopped_users = 0;
  std::vector<IndexSummary> per_index;
  std::vector<double> reward_at_stop;    // per stopped user
  std::vector<double> reward_after_forced;

  nlohmann::json ToJson() const;
};

ExperimentSummary Summarize(const ExperimentResult& result);

void WriteCsv(const ExperimentResult& result, std::ostream& out);
nlohmann::json Manifest(const ExperimentResult& result);

}  // namespace infopref

#endif  // INFOPREF_SIMULATION_H_
