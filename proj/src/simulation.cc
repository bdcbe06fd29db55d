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

#include "infopref/simulation.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

#include "infopref/choice_model.h"
#include "infopref/errors.h"
#include "infopref/json_codec.h"
#include "infopref/parallel.h"
#include "infopref/random.h"

namespace infopref {
namespace {

// Stream tags for DeriveSeed so that user draws do not depend on the objective
// or query type being simulated.
constexpr std::uint64_t kTruthStream = 0x7275746800000001ULL;
constexpr std::uint64_t kBeliefStream = 0x62656c6900000002ULL;
constexpr std::uint64_t kResponseStream = 0x7265737000000003ULL;
constexpr std::uint64_t kRandomStream = 0x72616e6400000004ULL;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string ResponseName(const QueryResponse& r) {
  if (r.about_equal()) return "about_equal";
  return std::string(1, static_cast<char>('A' + r.option()));
}

UserResult RunUser(const ExperimentConfig& config, const QueryPool& pool,
                   int user) {
  const int d = static_cast<int>(pool.dim());
  UserResult out;
  out.user = user;

  Rng truth_rng(DeriveSeed(config.rng_seed, kTruthStream, user));
  const RewardParams truth(SampleUnitSphere(d, truth_rng));
  out.true_omega.assign(truth.omega().begin(), truth.omega().end());
  HumanModelParams human{0.0, config.user_beta};
  switch (config.query_type) {
    case QueryType::kStrict:
      break;
    case QueryType::kWeak:
      human.delta = config.sampler.model.delta;
      break;
    case QueryType::kWeakUnknownDelta: {
      std::uniform_real_distribution<double> u(config.user_delta_range.lo,
                                               config.user_delta_range.hi);
      human.delta = u(truth_rng);
      break;
    }
  }
  out.true_delta = human.delta;

  SamplerConfig sampler = config.sampler;
  sampler.feature_dim = d;
  sampler.joint = config.query_type == QueryType::kWeakUnknownDelta;
  const std::uint64_t belief_base =
      DeriveSeed(config.rng_seed, kBeliefStream, user);
  const HumanModelParams& model = config.sampler.model;

  InteractionHistory history;
  int resamples = 0;
  auto resample = [&] {
    sampler.seed = DeriveSeed(belief_base, resamples++);
    return SampleBelief(sampler, history);
  };
  BeliefEnsemble belief = resample();
  out.initial_alignment = Alignment(belief, truth);

  Rng response_rng(DeriveSeed(config.rng_seed, kResponseStream, user));
  Rng random_rng(DeriveSeed(config.rng_seed, kRandomStream, user));
  PoolMask mask(pool.size(), 0);
  const bool stopping =
      config.cost.has_value() && config.objective == Objective::kInfoGain;
  int forced_left = 0;

  for (int step = 0; step < static_cast<int>(pool.size()); ++step) {
    const bool stopped = out.stop_index.has_value();
    if (!stopped && step >= config.num_queries) break;
    if (stopped && forced_left == 0) break;

    std::size_t index = 0;
    double info_gain = 0.0;
    double r_star = kNaN;
    if (stopping) {
      const StoppingDecision decision =
          StoppingValue(pool, belief, model, *config.cost, &mask, 1);
      if (!stopped && decision.stop()) {
        out.stop_index = step;
        out.stop_r_star = decision.r_star;
        forced_left = config.forced_after_stop;
        if (forced_left == 0) break;
      }
      index = decision.index;
      info_gain = decision.info_gain;
      r_star = decision.r_star;
    } else {
      index = config.objective == Objective::kRandom
                  ? SelectRandom(pool, &mask, random_rng)
                  : SelectQuery(pool, belief, config.objective, model, &mask, 1)
                        .index;
      info_gain = PoolInfoGain(pool, index, belief, model);
    }

    QueryRecord rec;
    rec.index = step + 1;
    rec.pool_index = index;
    rec.info_gain = info_gain;
    rec.cost = config.cost ? Cost(*config.cost, pool.features(index)) : 0.0;
    rec.r_star = r_star;
    rec.after_stop = out.stop_index.has_value();

    Query query = pool.Materialize(index);
    rec.response = SampleResponse(AnswerProbs(query, truth, human), response_rng);
    if (!rec.response.about_equal()) {
      const double chosen = Reward(truth, query.option(rec.response.option()));
      for (int k = 0; k < query.num_options(); ++k) {
        if (Reward(truth, query.option(k)) > chosen) rec.wrong_answer = true;
      }
    }
    mask[index] = 1;
    if (!(config.ablation_discard_equal && rec.response.about_equal())) {
      history.Append(std::move(query), rec.response);
      belief = resample();
    }
    rec.alignment = Alignment(belief, truth);
    out.queries.push_back(std::move(rec));
    if (out.stop_index) --forced_left;
  }
  return out;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double StandardError(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

std::string QueryTypeName(QueryType type) {
  switch (type) {
    case QueryType::kStrict:
      return "strict";
    case QueryType::kWeak:
      return "weak";
    case QueryType::kWeakUnknownDelta:
      return "weak_unknown_delta";
  }
  Fail(ErrorCode::kInternal, "bad query type");
}

QueryType ParseQueryType(const std::string& name) {
  if (name == "strict") return QueryType::kStrict;
  if (name == "weak") return QueryType::kWeak;
  if (name == "weak_unknown_delta") return QueryType::kWeakUnknownDelta;
  Fail(ErrorCode::kInvalidArgument, "unknown query type '" + name + "'");
}

void ExperimentConfig::Validate() const {
  Require(num_users >= 1, "num_users must be >= 1");
  Require(num_queries >= 1, "num_queries must be >= 1");
  Require(pool_size >= 1, "pool_size must be >= 1");
  Require(user_beta > 0.0 && std::isfinite(user_beta), "user_beta must be > 0");
  Require(user_delta_range.lo >= 0.0 &&
              user_delta_range.hi >= user_delta_range.lo,
          "user_delta_range must be an interval in [0, inf)");
  Require(forced_after_stop >= 0, "forced_after_stop must be >= 0");
  SamplerConfig s = sampler;
  s.feature_dim = 1;
  s.Validate();
}

nlohmann::json ExperimentConfig::ToJson() const {
  return {{"environment", environment},
          {"objective", ObjectiveName(objective)},
          {"query_type", QueryTypeName(query_type)},
          {"num_users", num_users},
          {"num_queries", num_queries},
          {"pool_size", pool_size},
          {"pool_seed", pool_seed},
          {"sampler", sampler.ToJson()},
          {"cost", cost ? cost->ToJson() : nlohmann::json(nullptr)},
          {"ablation_discard_equal", ablation_discard_equal},
          {"rng_seed", rng_seed},
          {"user_beta", user_beta},
          {"user_delta_range", {user_delta_range.lo, user_delta_range.hi}},
          {"forced_after_stop", forced_after_stop},
          {"threads", threads}};
}

ExperimentConfig ExperimentConfig::FromJson(const nlohmann::json& j) {
  Require(j.is_object(), "experiment config must be an object");
  ExperimentConfig c;
  try {
    if (j.contains("environment")) c.environment = j.at("environment");
    if (j.contains("objective")) {
      c.objective = ParseObjective(j.at("objective").get<std::string>());
    }
    if (j.contains("query_type")) {
      c.query_type = ParseQueryType(j.at("query_type").get<std::string>());
    }
    c.num_users = j.value("num_users", c.num_users);
    c.num_queries = j.value("num_queries", c.num_queries);
    c.pool_size = j.value("pool_size", c.pool_size);
    c.pool_seed = j.value("pool_seed", c.pool_seed);
    if (j.contains("sampler")) {
      c.sampler = SamplerConfig::FromJson(j.at("sampler"), c.sampler);
    }
    if (j.contains("cost") && !j.at("cost").is_null()) {
      c.cost = CostSpec::FromJson(j.at("cost"));
    }
    c.ablation_discard_equal =
        j.value("ablation_discard_equal", c.ablation_discard_equal);
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    c.user_beta = j.value("user_beta", c.user_beta);
    if (j.contains("user_delta_range")) {
      const auto& r = j.at("user_delta_range");
      c.user_delta_range = {r.at(0).get<double>(), r.at(1).get<double>()};
    }
    c.forced_after_stop = j.value("forced_after_stop", c.forced_after_stop);
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed experiment config: ") + e.what());
  }
  c.Validate();
  return c;
}

double UserResult::final_alignment() const {
  double m = initial_alignment;
  for (const auto& q : queries) {
    if (!q.after_stop) m = q.alignment;
  }
  return m;
}

double UserResult::CumulativeReward(std::size_t count) const {
  Require(count <= queries.size(), "reward horizon exceeds recorded queries");
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    total += queries[i].info_gain - queries[i].cost;
  }
  return total;
}

QueryPool BuildPool(const ExperimentConfig& config) {
  config.Validate();
  auto env = std::make_shared<const Environment>(
      Environment::Load(config.environment));
  return QueryPool::Generate(env, config.pool_size, 2,
                             config.query_type != QueryType::kStrict,
                             config.pool_seed, config.threads);
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  return RunExperiment(config, BuildPool(config));
}

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const QueryPool& pool) {
  config.Validate();
  Require(pool.size() == config.pool_size, "pool size does not match config");
  Require(pool.weak() == (config.query_type != QueryType::kStrict),
          "pool query type does not match config");
  ExperimentResult result;
  result.config = config;
  result.pool = pool.manifest();
  result.users.resize(config.num_users);
  ParallelChunks(config.num_users, config.threads,
                 [&](std::size_t, std::size_t begin, std::size_t end) {
                   for (std::size_t u = begin; u < end; ++u) {
                     result.users[u] = RunUser(config, pool, static_cast<int>(u));
                   }
                 });
  return result;
}

std::optional<int> FindPlateau(const std::vector<double>& alignments,
                               double width) {
  for (std::size_t i = 2; i < alignments.size(); ++i) {
    const auto [lo, hi] =
        std::minmax({alignments[i - 2], alignments[i - 1], alignments[i]});
    if (hi - lo <= width) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

EpsilonTuning TuneEpsilon(const ExperimentConfig& config) {
  return TuneEpsilon(config, BuildPool(config));
}

EpsilonTuning TuneEpsilon(const ExperimentConfig& config,
                          const QueryPool& pool) {
  Require(config.objective == Objective::kInfoGain,
          "epsilon tuning needs the info_gain objective");
  ExperimentConfig zero = config;
  zero.cost = CostSpec{config.cost ? config.cost->kind : CostSpec::Kind::kConstant,
                       0.0};
  zero.forced_after_stop = 0;
  return TuneEpsilonFromResult(RunExperiment(zero, pool));
}

EpsilonTuning TuneEpsilonFromResult(const ExperimentResult& result) {
  EpsilonTuning t;
  double total = 0.0;
  int used = 0;
  for (const auto& user : result.users) {
    std::vector<double> trace;
    for (const auto& q : user.queries) trace.push_back(q.alignment);
    const auto plateau = FindPlateau(trace);
    if (!plateau) {
      ++t.excluded;
      t.per_user.push_back(kNaN);
      t.plateau.push_back(0);
      continue;
    }
    // With a zero-epsilon cost, r* at query i is gain minus the epsilon-free
    // part of the cost; that is the epsilon that zeroes r* there.
    const QueryRecord& q = user.queries[*plateau - 1];
    const double eps = q.info_gain - q.cost;
    t.per_user.push_back(eps);
    t.plateau.push_back(*plateau);
    total += eps;
    ++used;
  }
  if (used == 0) {
    Fail(ErrorCode::kFailedPrecondition,
         "no simulated user reached an alignment plateau");
  }
  t.epsilon = total / used;
  return t;
}

nlohmann::json ExperimentSummary::ToJson() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : per_index) {
    rows.push_back({{"index", r.index},
                    {"users", r.users},
                    {"mean_alignment", r.mean_alignment},
                    {"se_alignment", r.se_alignment},
                    {"wrong_answers", r.wrong_answers},
                    {"about_equal", r.about_equal}});
  }
  return {{"initial_alignment", initial_alignment},
          {"final_alignment", final_alignment},
          {"final_alignment_se", final_alignment_se},
          {"wrong_answers", wrong_answers},
          {"about_equal", about_equal},
          {"stopped_users", stopped_users},
          {"per_index", rows},
          {"reward_at_stop", reward_at_stop},
          {"reward_after_forced", reward_after_forced}};
}

ExperimentSummary Summarize(const ExperimentResult& result) {
  ExperimentSummary s;
  std::vector<double> initial, final;
  std::vector<std::vector<double>> by_index;
  for (const auto& user : result.users) {
    initial.push_back(user.initial_alignment);
    final.push_back(user.final_alignment());
    if (by_index.size() < user.queries.size()) by_index.resize(user.queries.size());
    s.per_index.resize(by_index.size());
    for (std::size_t i = 0; i < user.queries.size(); ++i) {
      const auto& q = user.queries[i];
      by_index[i].push_back(q.alignment);
      s.per_index[i].wrong_answers += q.wrong_answer;
      s.per_index[i].about_equal += q.response.about_equal();
      if (!q.after_stop) {
        s.wrong_answers += q.wrong_answer;
        s.about_equal += q.response.about_equal();
      }
    }
    if (user.stop_index) {
      ++s.stopped_users;
      const auto at_stop = static_cast<std::size_t>(*user.stop_index);
      s.reward_at_stop.push_back(user.CumulativeReward(at_stop));
      s.reward_after_forced.push_back(user.CumulativeReward(user.queries.size()));
    }
  }
  for (std::size_t i = 0; i < by_index.size(); ++i) {
    s.per_index[i].index = static_cast<int>(i + 1);
    s.per_index[i].users = static_cast<int>(by_index[i].size());
    s.per_index[i].mean_alignment = Mean(by_index[i]);
    s.per_index[i].se_alignment = StandardError(by_index[i]);
  }
  s.initial_alignment = Mean(initial);
  s.final_alignment = Mean(final);
  s.final_alignment_se = StandardError(final);
  return s;
}

void WriteCsv(const ExperimentResult& result, std::ostream& out) {
  out << "user,query,pool_index,response,about_equal,wrong_answer,alignment,"
         "info_gain,cost,r_star,after_stop,stop_index\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& user : result.users) {
    const std::string stop =
        user.stop_index ? std::to_string(*user.stop_index) : std::string();
    for (const auto& q : user.queries) {
      line.str("");
      line << user.user << ',' << q.index << ',' << q.pool_index << ','
           << ResponseName(q.response) << ',' << q.response.about_equal() << ','
           << q.wrong_answer << ',' << q.alignment << ',' << q.info_gain << ','
           << q.cost << ',';
      if (!std::isnan(q.r_star)) line << q.r_star;
      line << ',' << q.after_stop << ',' << stop << '\n';
      out << line.str();
    }
  }
}

nlohmann::json Manifest(const ExperimentResult& result) {
  std::ostringstream csv;
  WriteCsv(result, csv);
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : result.users) {
    users.push_back({{"user", u.user},
                     {"true_omega", u.true_omega},
                     {"true_delta", u.true_delta},
                     {"initial_alignment", u.initial_alignment},
                     {"stop_index", u.stop_index ? nlohmann::json(*u.stop_index)
                                                 : nlohmann::json(nullptr)},
                     {"stop_r_star", u.stop_r_star ? nlohmann::json(*u.stop_r_star)
                                                   : nlohmann::json(nullptr)}});
  }
  return {{"config", result.config.ToJson()},
          {"pool", result.pool.ToJson()},
          {"users", users},
          {"records_hash", ContentHash(csv.str())},
          {"summary", Summarize(result).ToJson()}};
}

}  // namespace infopref
