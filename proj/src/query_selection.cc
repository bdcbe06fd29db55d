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

#include "infopref/query_selection.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "infopref/choice_model.h"
#include "infopref/errors.h"
#include "infopref/json_codec.h"
#include "infopref/parallel.h"

namespace infopref {
namespace {

inline double DotUnchecked(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

bool Masked(const PoolMask* excluded, std::size_t i) {
  return excluded != nullptr && (*excluded)[i] != 0;
}

void CheckPoolArgs(const QueryPool& pool, const BeliefEnsemble& belief,
                   const PoolMask* excluded) {
  if (pool.empty()) Fail(ErrorCode::kInvalidArgument, "query pool is empty");
  Require(pool.dim() == belief.dim(),
          "pool and belief have different feature dimensions");
  Require(excluded == nullptr || excluded->size() == pool.size(),
          "pool mask has the wrong size");
}

// Index-tagged running optimum; lower index wins ties.
struct Best {
  double score = 0.0;
  std::size_t index = 0;
  bool found = false;

  void Offer(double s, std::size_t i, bool maximize) {
    if (!found || (maximize ? s > score : s < score) ||
        (s == score && i < index)) {
      score = s;
      index = i;
      found = true;
    }
  }
};

// Scans the unmasked pool with score_fn(table, i) and returns the optimum.
// sigma(x), log sigma(x), sigma(-x), log sigma(-x) from one exp and log1p.
inline void Logistic(double x, double& p, double& log_p, double& q,
                     double& log_q) {
  const double e = std::exp(-std::abs(x));
  const double l = std::log1p(e);
  const double big = 1.0 / (1.0 + e);
  const double small = e * big;
  if (x >= 0.0) {
    p = big, log_p = -l, q = small, log_q = -x - l;
  } else {
    p = small, log_p = x - l, q = big, log_q = -l;
  }
}

// log(e^{2 delta} - 1), the about-equal factor of the weak model.
inline double LogEqualScale(double delta) {
  return delta > 0.0 ? std::log(std::expm1(2.0 * delta))
                     : -std::numeric_limits<double>::infinity();
}

template <typename ScoreFn>
Best ScanPool(const QueryPool& pool, const BeliefEnsemble& belief,
              const HumanModelParams& params, const PoolMask* excluded,
              int threads, bool maximize, ScoreFn&& score_fn) {
  const int workers = ResolveThreads(threads);
  std::vector<Best> partial(workers);
  ParallelChunks(pool.size(), workers,
                 [&](std::size_t w, std::size_t begin, std::size_t end) {
                   ProbabilityTable table;
                   Best best;
                   for (std::size_t i = begin; i < end; ++i) {
                     if (Masked(excluded, i)) continue;
                     table.Fill(pool.features(i), belief, params);
                     best.Offer(score_fn(table, i), i, maximize);
                   }
                   partial[w] = best;
                 });
  Best best;
  for (const auto& p : partial) {
    if (p.found) best.Offer(p.score, p.index, maximize);
  }
  if (!best.found) {
    Fail(ErrorCode::kFailedPrecondition, "every pool query has been used");
  }
  return best;
}

}  // namespace

FlatQuery::FlatQuery(const Query& query)
    : num_options_(query.num_options()),
      dim_(query.feature_dim()),
      weak_(query.weak()) {
  features_.reserve(num_options_ * dim_);
  for (const auto& t : query.options()) {
    features_.insert(features_.end(), t.features.values().begin(),
                     t.features.values().end());
  }
}

ProbabilityTable ProbabilityTable::FromProbabilities(std::size_t rows,
                                                     std::size_t cols,
                                                     std::vector<double> probs) {
  Require(rows > 0 && cols > 0 && probs.size() == rows * cols,
          "probability table has the wrong shape");
  ProbabilityTable table;
  table.rows_ = rows;
  table.cols_ = cols;
  table.log_probs_.resize(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    Require(probs[i] >= 0.0 && probs[i] <= 1.0, "probability outside [0, 1]");
    table.log_probs_[i] = std::log(probs[i]);
  }
  table.probs_ = std::move(probs);
  return table;
}

void ProbabilityTable::Fill(const QueryFeatures& query,
                            const BeliefEnsemble& belief,
                            const HumanModelParams& params) {
  Require(query.dim == belief.dim(), "query and belief dimensions differ");
  rows_ = belief.size();
  cols_ = query.num_answers();
  probs_.resize(rows_ * cols_);
  log_probs_.resize(rows_ * cols_);
  rewards_.resize(query.num_options);
  const bool joint = belief.joint();
  if (query.num_options == 2) {
    FillPairs(query, belief, params, joint);
    return;
  }
  for (std::size_t m = 0; m < rows_; ++m) {
    const auto& sample = belief.samples()[m];
    const double* w = sample.omega.omega().data();
    for (int k = 0; k < query.num_options; ++k) {
      rewards_[k] = DotUnchecked(w, query.flat.data() + k * query.dim, query.dim);
    }
    const HumanModelParams& nu = joint ? *sample.nu : params;
    std::span<double> lp(log_probs_.data() + m * cols_, cols_);
    StrictLogProbs(rewards_, nu.beta, lp);
    for (std::size_t a = 0; a < cols_; ++a) probs_[m * cols_ + a] = std::exp(lp[a]);
  }
}

// Two-option rows share one exp/log1p pair per logistic term.
void ProbabilityTable::FillPairs(const QueryFeatures& query,
                                 const BeliefEnsemble& belief,
                                 const HumanModelParams& params, bool joint) {
  const double* a = query.flat.data();
  const double* b = a + query.dim;
  double scale = std::expm1(2.0 * params.delta);
  double log_scale = LogEqualScale(params.delta);
  for (std::size_t m = 0; m < rows_; ++m) {
    const auto& sample = belief.samples()[m];
    const double* w = sample.omega.omega().data();
    double diff = 0.0;
    for (std::size_t i = 0; i < query.dim; ++i) diff += w[i] * (a[i] - b[i]);
    const HumanModelParams& nu = joint ? *sample.nu : params;
    const double gap = nu.beta * diff;
    double* p = probs_.data() + m * cols_;
    double* lp = log_probs_.data() + m * cols_;
    if (!query.weak) {
      Logistic(gap, p[0], lp[0], p[1], lp[1]);
      continue;
    }
    double unused_p, unused_lp;
    Logistic(gap - nu.delta, p[0], lp[0], unused_p, unused_lp);
    Logistic(-gap - nu.delta, p[1], lp[1], unused_p, unused_lp);
    if (joint) {
      scale = std::expm1(2.0 * nu.delta);
      log_scale = LogEqualScale(nu.delta);
    }
    lp[2] = log_scale + lp[0] + lp[1];
    p[2] = scale * p[0] * p[1];
  }
}

double VolumeRemovalFromTable(const ProbabilityTable& table) {
  double score = 0.0;
  for (std::size_t a = 0; a < table.cols(); ++a) {
    double mass = 0.0;
    for (std::size_t m = 0; m < table.rows(); ++m) mass += table.prob(m, a);
    score += mass * mass;
  }
  return score;
}

double InfoGainFromTable(const ProbabilityTable& table) {
  const double log_m = std::log(static_cast<double>(table.rows()));
  double total = 0.0;
  for (std::size_t a = 0; a < table.cols(); ++a) {
    double mass = 0.0;
    for (std::size_t m = 0; m < table.rows(); ++m) mass += table.prob(m, a);
    if (mass <= 0.0) continue;
    const double log_mass = std::log(mass);
    for (std::size_t m = 0; m < table.rows(); ++m) {
      const double p = table.prob(m, a);
      // x log x -> 0
      if (p > 0.0) total += p * (table.log_prob(m, a) + log_m - log_mass);
    }
  }
  return total / (static_cast<double>(table.rows()) * std::numbers::ln2);
}

UncertaintySplit DecomposeInfoGain(const ProbabilityTable& table) {
  UncertaintySplit split;
  const double rows = static_cast<double>(table.rows());
  for (std::size_t a = 0; a < table.cols(); ++a) {
    double marginal = 0.0;
    for (std::size_t m = 0; m < table.rows(); ++m) marginal += table.prob(m, a);
    marginal /= rows;
    if (marginal > 0.0) split.robot_entropy -= marginal * std::log2(marginal);
  }
  for (std::size_t m = 0; m < table.rows(); ++m) {
    double entropy = 0.0;
    for (std::size_t a = 0; a < table.cols(); ++a) {
      const double p = table.prob(m, a);
      if (p > 0.0) entropy -= p * std::log2(p);
    }
    split.human_entropy += entropy / rows;
  }
  return split;
}

double VolumeRemovalScore(const Query& query, const BeliefEnsemble& belief,
                          const HumanModelParams& params) {
  Require(!belief.joint(), "volume removal needs a plain belief");
  const FlatQuery flat(query);
  ProbabilityTable table;
  table.Fill(flat.view(), belief, params);
  return VolumeRemovalFromTable(table);
}

double InfoGainScore(const Query& query, const BeliefEnsemble& belief,
                     const HumanModelParams& params) {
  Require(!belief.joint(), "InfoGainScore needs a plain belief");
  const FlatQuery flat(query);
  ProbabilityTable table;
  table.Fill(flat.view(), belief, params);
  return InfoGainFromTable(table);
}

double InfoGainJointScore(const Query& query, const BeliefEnsemble& belief) {
  Require(belief.joint(), "InfoGainJointScore needs a joint (omega, nu) belief");
  const FlatQuery flat(query);
  ProbabilityTable table;
  table.Fill(flat.view(), belief, HumanModelParams{});
  return InfoGainFromTable(table);
}

nlohmann::json CostSpec::ToJson() const {
  return {{"kind", kind == Kind::kConstant ? "constant" : "interpretability"},
          {"epsilon", epsilon}};
}

CostSpec CostSpec::FromJson(const nlohmann::json& j) {
  try {
    CostSpec spec;
    const std::string kind = j.value("kind", std::string("constant"));
    if (kind == "constant") {
      spec.kind = Kind::kConstant;
    } else if (kind == "interpretability") {
      spec.kind = Kind::kInterpretability;
    } else {
      Fail(ErrorCode::kInvalidArgument, "unknown cost kind '" + kind + "'");
    }
    spec.epsilon = j.at("epsilon").get<double>();
    Require(std::isfinite(spec.epsilon), "cost epsilon must be finite");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("malformed cost: ") + e.what());
  }
}

double Cost(const CostSpec& spec, const QueryFeatures& query) {
  if (spec.kind == CostSpec::Kind::kConstant) return spec.epsilon;
  Require(query.num_options == 2, "interpretability cost needs K = 2");
  Require(query.dim >= 2, "interpretability cost needs at least two features");
  const auto a = query.option(0);
  const auto b = query.option(1);
  std::size_t top = 0;
  for (std::size_t i = 1; i < query.dim; ++i) {
    if (std::abs(a[i] - b[i]) > std::abs(a[top] - b[top])) top = i;
  }
  double runner_up = 0.0;
  for (std::size_t j = 0; j < query.dim; ++j) {
    if (j != top) runner_up = std::max(runner_up, std::abs(a[j] - b[j]));
  }
  return spec.epsilon - std::abs(a[top] - b[top]) + runner_up;
}

double Cost(const CostSpec& spec, const Query& query) {
  const FlatQuery flat(query);
  return Cost(spec, flat.view());
}

nlohmann::json PoolManifest::ToJson() const {
  return {{"env_id", env_id},           {"env_fingerprint", env_fingerprint},
          {"seed", seed},               {"size", size},
          {"num_options", num_options}, {"weak", weak},
          {"content_hash", content_hash}};
}

PoolManifest PoolManifest::FromJson(const nlohmann::json& j) {
  try {
    PoolManifest m;
    m.env_id = j.at("env_id").get<std::string>();
    m.env_fingerprint = j.at("env_fingerprint").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.size = j.at("size").get<std::size_t>();
    m.num_options = j.at("num_options").get<int>();
    m.weak = j.at("weak").get<bool>();
    m.content_hash = j.value("content_hash", "");
    return m;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed pool manifest: ") + e.what());
  }
}

QueryPool QueryPool::Generate(std::shared_ptr<const Environment> env,
                              std::size_t size, int num_options, bool weak,
                              std::uint64_t seed, int threads) {
  Require(env != nullptr, "pool generation needs an environment");
  Require(num_options >= 2, "queries need at least two options");
  Require(!weak || num_options == 2, "weak queries are only defined for K = 2");
  const auto& spec = env->spec();
  QueryPool pool;
  pool.env_ = env;
  pool.size_ = size;
  pool.num_options_ = num_options;
  pool.dim_ = spec.feature_dim;
  pool.weak_ = weak;
  const std::size_t action_len = spec.epochs * spec.action_dim;
  pool.features_.resize(size * num_options * pool.dim_);
  pool.actions_.resize(size * num_options * action_len);
  ParallelChunks(size, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (int k = 0; k < num_options; ++k) {
        const std::size_t slot = i * num_options + k;
        const Matrix actions = env->RandomActions(DeriveSeed(seed, i, k));
        const FeatureVector f =
            env->Normalize(env->RawFeatures(env->Simulate(actions)));
        std::copy(f.values().begin(), f.values().end(),
                  pool.features_.begin() + slot * pool.dim_);
        std::copy(actions.data.begin(), actions.data.end(),
                  pool.actions_.begin() + slot * action_len);
      }
    }
  });
  pool.manifest_ = {env->id(),
                    env->Fingerprint(),
                    seed,
                    size,
                    num_options,
                    weak,
                    ContentHash({reinterpret_cast<const char*>(pool.features_.data()),
                                 pool.features_.size() * sizeof(double)})};
  return pool;
}

QueryPool QueryPool::FromQueries(std::vector<Query> queries) {
  Require(!queries.empty(), "query pool is empty");
  QueryPool pool;
  const Query& first = queries.front();
  pool.size_ = queries.size();
  pool.num_options_ = first.num_options();
  pool.dim_ = first.feature_dim();
  pool.weak_ = first.weak();
  for (const auto& q : queries) {
    Require(q.num_options() == pool.num_options_ && q.weak() == pool.weak_ &&
                q.feature_dim() == pool.dim_ &&
                q.option(0).env_id == first.option(0).env_id,
            "pool queries must share environment, K and weak flag");
    for (const auto& t : q.options()) {
      pool.features_.insert(pool.features_.end(), t.features.values().begin(),
                            t.features.values().end());
    }
  }
  pool.explicit_ = std::move(queries);
  pool.manifest_.env_id = first.option(0).env_id;
  pool.manifest_.size = pool.size_;
  pool.manifest_.num_options = pool.num_options_;
  pool.manifest_.weak = pool.weak_;
  pool.manifest_.content_hash =
      ContentHash({reinterpret_cast<const char*>(pool.features_.data()),
                   pool.features_.size() * sizeof(double)});
  return pool;
}

Query QueryPool::Materialize(std::size_t i) const {
  Require(i < size_, "pool index out of range");
  if (!explicit_.empty()) return explicit_[i];
  const auto& spec = env_->spec();
  const std::size_t action_len = spec.epochs * spec.action_dim;
  std::vector<Trajectory> options;
  for (int k = 0; k < num_options_; ++k) {
    Matrix actions(spec.epochs, spec.action_dim);
    const auto begin = actions_.begin() + (i * num_options_ + k) * action_len;
    std::copy(begin, begin + action_len, actions.data.begin());
    options.push_back(env_->Rollout(actions));
  }
  return Query(std::move(options), weak_);
}

std::string ObjectiveName(Objective objective) {
  switch (objective) {
    case Objective::kInfoGain:
      return "info_gain";
    case Objective::kVolumeRemoval:
      return "volume_removal";
    case Objective::kRandom:
      return "random";
  }
  return "unknown";
}

Objective ParseObjective(const std::string& name) {
  if (name == "info_gain") return Objective::kInfoGain;
  if (name == "volume_removal") return Objective::kVolumeRemoval;
  if (name == "random") return Objective::kRandom;
  Fail(ErrorCode::kInvalidArgument, "unknown objective '" + name + "'");
}

Selection SelectQuery(const QueryPool& pool, const BeliefEnsemble& belief,
                      Objective objective, const HumanModelParams& params,
                      const PoolMask* excluded, int threads) {
  CheckPoolArgs(pool, belief, excluded);
  Best best;
  switch (objective) {
    case Objective::kInfoGain:
      best = ScanPool(pool, belief, params, excluded, threads, true,
                      [](const ProbabilityTable& t, std::size_t) {
                        return InfoGainFromTable(t);
                      });
      break;
    case Objective::kVolumeRemoval:
      Require(!belief.joint(), "volume removal needs a plain belief");
      best = ScanPool(pool, belief, params, excluded, threads, false,
                      [](const ProbabilityTable& t, std::size_t) {
                        return VolumeRemovalFromTable(t);
                      });
      break;
    case Objective::kRandom:
      Fail(ErrorCode::kInvalidArgument, "use SelectRandom for random querying");
  }
  return {best.index, best.score};
}

std::size_t SelectRandom(const QueryPool& pool, const PoolMask* excluded,
                         Rng& rng) {
  if (pool.empty()) Fail(ErrorCode::kInvalidArgument, "query pool is empty");
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!Masked(excluded, i)) open.push_back(i);
  }
  if (open.empty()) {
    Fail(ErrorCode::kFailedPrecondition, "every pool query has been used");
  }
  return open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
}

double PoolInfoGain(const QueryPool& pool, std::size_t i,
                    const BeliefEnsemble& belief, const HumanModelParams& params) {
  Require(i < pool.size(), "pool index out of range");
  ProbabilityTable table;
  table.Fill(pool.features(i), belief, params);
  return InfoGainFromTable(table);
}

StoppingDecision StoppingValue(const QueryPool& pool,
                               const BeliefEnsemble& belief,
                               const HumanModelParams& params,
                               const CostSpec& cost, const PoolMask* excluded,
                               int threads) {
  CheckPoolArgs(pool, belief, excluded);
  const Best best = ScanPool(pool, belief, params, excluded, threads, true,
                             [&](const ProbabilityTable& t, std::size_t i) {
                               return InfoGainFromTable(t) -
                                      Cost(cost, pool.features(i));
                             });
  StoppingDecision decision;
  decision.r_star = best.score;
  decision.index = best.index;
  decision.cost = Cost(cost, pool.features(best.index));
  decision.info_gain = PoolInfoGain(pool, best.index, belief, params);
  return decision;
}

}  // namespace infopref
