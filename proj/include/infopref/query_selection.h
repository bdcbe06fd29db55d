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

// Query scoring and selection over a finite pool of candidate queries.
//
// Every score is computed from an M x A table of answer probabilities
// P(q | Q, omega_m) (rows: belief samples, columns: answers):
//
//   volume removal  sum_q (sum_m P)^2                        (minimized)
//   information gain (1/M) sum_q sum_m P log2(M P / sum_m' P)  (maximized)
//
// The stopping value is max over the pool of information gain minus cost;
// learning should stop exactly when it is negative.

#ifndef INFOPREF_QUERY_SELECTION_H_
#define INFOPREF_QUERY_SELECTION_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infopref/environment.h"
#include "infopref/random.h"
#include "infopref/types.h"

namespace infopref {

// Option features of one query, row-major num_options x dim.
struct QueryFeatures {
  std::span<const double> flat;
  int num_options = 0;
  std::size_t dim = 0;
  bool weak = false;

  std::span<const double> option(int k) const {
    return flat.subspan(k * dim, dim);
  }
  int num_answers() const { return num_options + (weak ? 1 : 0); }
};

// Owning flattened copy of a Query's features.
class FlatQuery {
 public:
  explicit FlatQuery(const Query& query);
  QueryFeatures view() const {
    return {features_, num_options_, dim_, weak_};
  }

 private:
  std::vector<double> features_;
  int num_options_;
  std::size_t dim_;
  bool weak_;
};

// Answer probabilities, one row per belief sample.
class ProbabilityTable {
 public:
  ProbabilityTable() = default;
  // Table from explicit probabilities (row-major rows x cols).
  static ProbabilityTable FromProbabilities(std::size_t rows, std::size_t cols,
                                            std::vector<double> probs);

  // Refills this table in place for `query` under `belief`. Plain beliefs use
  // `params` for every row; joint beliefs use each sample's own nu.
  void Fill(const QueryFeatures& query, const BeliefEnsemble& belief,
            const HumanModelParams& params);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double prob(std::size_t m, std::size_t a) const { return probs_[m * cols_ + a]; }
  double log_prob(std::size_t m, std::size_t a) const {
    return log_probs_[m * cols_ + a];
  }

 private:
  void FillPairs(const QueryFeatures& query, const BeliefEnsemble& belief,
                 const HumanModelParams& params, bool joint);

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> probs_;
  std::vector<double> log_probs_;  // natural log
  std::vector<double> rewards_;
};

double VolumeRemovalFromTable(const ProbabilityTable& table);
double InfoGainFromTable(const ProbabilityTable& table);

// Information gain written as robot uncertainty minus human uncertainty:
// the entropy of the sample-averaged answer distribution minus the mean
// per-sample answer entropy, both in bits.
struct UncertaintySplit {
  double robot_entropy = 0.0;
  double human_entropy = 0.0;
  double info_gain() const { return robot_entropy - human_entropy; }
};
UncertaintySplit DecomposeInfoGain(const ProbabilityTable& table);

// Scores for a single query. The plain variants require a plain belief;
// InfoGainJointScore requires a joint one.
double VolumeRemovalScore(const Query& query, const BeliefEnsemble& belief,
                          const HumanModelParams& params);
double InfoGainScore(const Query& query, const BeliefEnsemble& belief,
                     const HumanModelParams& params);
double InfoGainJointScore(const Query& query, const BeliefEnsemble& belief);

struct CostSpec {
  enum class Kind { kConstant, kInterpretability };
  Kind kind = Kind::kConstant;
  double epsilon = 0.0;

  static CostSpec Constant(double epsilon) { return {Kind::kConstant, epsilon}; }
  static CostSpec Interpretability(double epsilon) {
    return {Kind::kInterpretability, epsilon};
  }
  // {"kind": "constant" | "interpretability", "epsilon": x}
  nlohmann::json ToJson() const;
  static CostSpec FromJson(const nlohmann::json& j);
  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

// Constant: epsilon. Interpretability (K = 2 only), with
// Psi = Phi(xi_1) - Phi(xi_2) and i* = argmax |Psi_i|:
//   epsilon - |Psi_i*| + max_{j != i*} |Psi_j|
double Cost(const CostSpec& spec, const QueryFeatures& query);
double Cost(const CostSpec& spec, const Query& query);

struct PoolManifest {
  std::string env_id;
  std::string env_fingerprint;
  std::uint64_t seed = 0;
  std::size_t size = 0;
  int num_options = 2;
  bool weak = false;
  std::string content_hash;  // of the pool's feature table

  nlohmann::json ToJson() const;
  static PoolManifest FromJson(const nlohmann::json& j);
  friend bool operator==(const PoolManifest&, const PoolManifest&) = default;
};

// Finite candidate set. Generated pools store only actions and features;
// Materialize() re-runs the rollouts to recover full trajectories.
class QueryPool {
 public:
  // `size` queries of `num_options` independent random trajectories each.
  // Option k of query i uses trajectory seed DeriveSeed(seed, i, k).
  static QueryPool Generate(std::shared_ptr<const Environment> env,
                            std::size_t size, int num_options, bool weak,
                            std::uint64_t seed, int threads = 1);
  static QueryPool FromQueries(std::vector<Query> queries);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  int num_options() const { return num_options_; }
  bool weak() const { return weak_; }
  std::size_t dim() const { return dim_; }

  QueryFeatures features(std::size_t i) const {
    return {{features_.data() + i * num_options_ * dim_, num_options_ * dim_},
            num_options_,
            dim_,
            weak_};
  }
  Query Materialize(std::size_t i) const;
  const PoolManifest& manifest() const { return manifest_; }
  const Environment* environment() const { return env_.get(); }

 private:
  QueryPool() = default;

  std::shared_ptr<const Environment> env_;
  std::size_t size_ = 0;
  int num_options_ = 0;
  std::size_t dim_ = 0;
  bool weak_ = false;
  std::vector<double> features_;
  std::vector<double> actions_;
  std::vector<Query> explicit_;
  PoolManifest manifest_;
};

// Nonzero entries mark pool indices that may not be selected.
using PoolMask = std::vector<std::uint8_t>;

enum class Objective { kInfoGain, kVolumeRemoval, kRandom };

std::string ObjectiveName(Objective objective);
Objective ParseObjective(const std::string& name);

struct Selection {
  std::size_t index = 0;
  double score = 0.0;
};

// Arg-optimum over the pool: max information gain (joint form for joint
// beliefs) or min volume removal score. Ties go to the lowest index.
// Fails on an empty pool, a fully masked pool, or kRandom.
Selection SelectQuery(const QueryPool& pool, const BeliefEnsemble& belief,
                      Objective objective, const HumanModelParams& params,
                      const PoolMask* excluded = nullptr, int threads = 1);

// Uniform draw among the unmasked pool entries.
std::size_t SelectRandom(const QueryPool& pool, const PoolMask* excluded,
                         Rng& rng);

// Information gain of pool entry i (joint form for joint beliefs).
double PoolInfoGain(const QueryPool& pool, std::size_t i,
                    const BeliefEnsemble& belief, const HumanModelParams& params);

struct StoppingDecision {
  double r_star = 0.0;  // max_Q info_gain(Q) - cost(Q)
  std::size_t index = 0;
  double info_gain = 0.0;
  double cost = 0.0;

  bool stop() const { return r_star < 0.0; }
};

StoppingDecision StoppingValue(const QueryPool& pool,
                               const BeliefEnsemble& belief,
                               const HumanModelParams& params,
                               const CostSpec& cost,
                               const PoolMask* excluded = nullptr,
                               int threads = 1);

}  // namespace infopref

#endif  // INFOPREF_QUERY_SELECTION_H_
