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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "infopref/errors.h"
#include "infopref/simulation.h"

namespace infopref {
namespace {

ExperimentConfig Small(QueryType type, Objective objective) {
  ExperimentConfig c;
  c.environment = {{"env_id", "lds"}, {"normalizer_samples", 2000}};
  c.objective = objective;
  c.query_type = type;
  c.num_users = 4;
  c.num_queries = 6;
  c.pool_size = 300;
  c.sampler.num_samples = 40;
  c.sampler.burn_in = 300;
  c.sampler.thinning = 5;
  c.threads = 1;
  return c;
}

const QueryPool& PoolFor(QueryType type) {
  static const QueryPool strict = BuildPool(Small(QueryType::kStrict, Objective::kInfoGain));
  static const QueryPool weak = BuildPool(Small(QueryType::kWeak, Objective::kInfoGain));
  return type == QueryType::kStrict ? strict : weak;
}

std::string Csv(const ExperimentResult& r) {
  std::ostringstream out;
  WriteCsv(r, out);
  return out.str();
}

UserResult SyntheticUser(const std::vector<double>& alignments,
                         const std::vector<double>& gains, double cost) {
  UserResult u;
  for (std::size_t i = 0; i < alignments.size(); ++i) {
    QueryRecord q;
    q.index = static_cast<int>(i + 1);
    q.alignment = alignments[i];
    q.info_gain = gains[i];
    q.cost = cost;
    u.queries.push_back(q);
  }
  return u;
}

TEST_CASE("plateau is the end of the first narrow window") {
  const std::vector<double> trace = {0.1,  0.2,   0.3,   0.38, 0.44,
                                     0.48, 0.50, 0.505, 0.512, 0.52};
  CHECK(FindPlateau(trace) == 9);
  std::vector<double> rising;
  for (int i = 0; i < 20; ++i) rising.push_back(0.05 * i);
  CHECK_FALSE(FindPlateau(rising).has_value());
  CHECK_FALSE(FindPlateau({0.5, 0.5}).has_value());
  CHECK(FindPlateau({0.5, 0.5, 0.5}) == 3);
}

TEST_CASE("constant-cost epsilon is the gain at the plateau") {
  ExperimentResult r;
  std::vector<double> gains(10, 0.9);
  gains[8] = 0.42;
  r.users.push_back(SyntheticUser(
      {0.1, 0.2, 0.3, 0.38, 0.44, 0.48, 0.50, 0.505, 0.512, 0.52}, gains, 0.0));
  const auto t = TuneEpsilonFromResult(r);
  CHECK(t.epsilon == doctest::Approx(0.42).epsilon(1e-15));
  CHECK(t.plateau[0] == 9);
  CHECK(t.excluded == 0);

  std::vector<double> rising;
  for (int i = 0; i < 10; ++i) rising.push_back(0.05 * i);
  r.users.push_back(SyntheticUser(rising, gains, 0.0));
  const auto t2 = TuneEpsilonFromResult(r);
  CHECK(t2.excluded == 1);
  CHECK(std::isnan(t2.per_user[1]));
  CHECK(t2.epsilon == doctest::Approx(0.42).epsilon(1e-15));

  ExperimentResult none;
  none.users.push_back(SyntheticUser(rising, gains, 0.0));
  try {
    TuneEpsilonFromResult(none);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kFailedPrecondition);
  }
}

TEST_CASE("summary statistics") {
  ExperimentResult one;
  one.users.push_back(SyntheticUser({0.2, 0.4, 0.6}, {1.0, 0.5, 0.25}, 0.3));
  one.users[0].stop_index = 2;
  one.users[0].queries[2].after_stop = true;
  const auto s1 = Summarize(one);
  CHECK(s1.final_alignment_se == 0.0);
  CHECK(s1.per_index[1].se_alignment == 0.0);
  CHECK(s1.final_alignment == 0.4);
  REQUIRE(s1.reward_at_stop.size() == 1);
  CHECK(s1.reward_at_stop[0] == doctest::Approx(0.7 + 0.2).epsilon(1e-15));
  CHECK(s1.reward_after_forced[0] ==
        doctest::Approx(0.7 + 0.2 - 0.05).epsilon(1e-15));

  ExperimentResult two = one;
  two.users.push_back(one.users[0]);
  const auto s2 = Summarize(two);
  CHECK(s2.final_alignment == s1.final_alignment);
  CHECK(s2.per_index[2].mean_alignment == 0.6);
  CHECK(s2.final_alignment_se == 0.0);
  CHECK(s2.stopped_users == 2);
}

TEST_CASE("config round-trips through json") {
  ExperimentConfig c = Small(QueryType::kWeakUnknownDelta, Objective::kVolumeRemoval);
  c.cost = CostSpec::Interpretability(0.25);
  c.ablation_discard_equal = true;
  c.forced_after_stop = 3;
  c.user_delta_range = {0.5, 1.5};
  const auto back = ExperimentConfig::FromJson(c.ToJson());
  CHECK(back.ToJson() == c.ToJson());
  CHECK(ExperimentConfig::FromJson(nlohmann::json::object()).ToJson() ==
        ExperimentConfig().ToJson());
  CHECK_THROWS_AS(ExperimentConfig::FromJson({{"num_users", 0}}), Error);
  CHECK_THROWS_AS(ExperimentConfig::FromJson({{"objective", "best"}}), Error);
}

TEST_CASE("random querying starts from a symmetric prior") {
  ExperimentConfig c = Small(QueryType::kStrict, Objective::kRandom);
  c.num_users = 30;
  c.num_queries = 1;
  const auto s = Summarize(RunExperiment(c, PoolFor(c.query_type)));
  CHECK(std::abs(s.initial_alignment) <= 0.1);
}

TEST_CASE("a nearly noiseless user raises alignment under info gain") {
  ExperimentConfig c = Small(QueryType::kStrict, Objective::kInfoGain);
  c.num_users = 6;
  c.num_queries = 25;
  c.user_beta = 50.0;
  const auto s = Summarize(RunExperiment(c, PoolFor(c.query_type)));
  CHECK(s.final_alignment > s.initial_alignment + 0.2);
}

TEST_CASE("experiments are reproducible and thread-count independent") {
  ExperimentConfig c = Small(QueryType::kWeak, Objective::kInfoGain);
  const auto a = RunExperiment(c, PoolFor(c.query_type));
  const auto b = RunExperiment(c, PoolFor(c.query_type));
  c.threads = 3;
  const auto t = RunExperiment(c, PoolFor(c.query_type));
  CHECK(Csv(a) == Csv(b));
  CHECK(Csv(a) == Csv(t));
  CHECK(Manifest(a).at("records_hash") == Manifest(t).at("records_hash"));
  CHECK(Manifest(a).at("summary") == Manifest(t).at("summary"));
}

TEST_CASE("records are well formed") {
  for (QueryType type : {QueryType::kStrict, QueryType::kWeak}) {
    for (Objective obj :
         {Objective::kInfoGain, Objective::kVolumeRemoval, Objective::kRandom}) {
      const ExperimentConfig c = Small(type, obj);
      const auto r = RunExperiment(c, PoolFor(type));
      for (const auto& u : r.users) {
        CHECK(u.queries.size() == 6);
        std::set<std::size_t> asked;
        for (const auto& q : u.queries) {
          CHECK(asked.insert(q.pool_index).second);
          CHECK(q.alignment >= -1.0);
          CHECK(q.alignment <= 1.0);
          CHECK(q.info_gain >= 0.0);
          if (q.response.about_equal()) CHECK_FALSE(q.wrong_answer);
          if (type == QueryType::kStrict) CHECK_FALSE(q.response.about_equal());
        }
      }
    }
  }
}

TEST_CASE("user truths are shared across objectives and query types") {
  const auto a = RunExperiment(Small(QueryType::kStrict, Objective::kInfoGain),
                               PoolFor(QueryType::kStrict));
  const auto b = RunExperiment(Small(QueryType::kWeak, Objective::kRandom),
                               PoolFor(QueryType::kWeak));
  for (std::size_t u = 0; u < a.users.size(); ++u) {
    CHECK(a.users[u].true_omega == b.users[u].true_omega);
  }
}

TEST_CASE("discarding about-equal answers still consumes the query") {
  ExperimentConfig c = Small(QueryType::kWeak, Objective::kInfoGain);
  c.ablation_discard_equal = true;
  c.user_beta = 0.2;  // noisy users say "about equal" often
  c.num_queries = 10;
  const auto r = RunExperiment(c, PoolFor(c.query_type));
  int equal = 0;
  for (const auto& u : r.users) {
    double previous = u.initial_alignment;
    std::set<std::size_t> asked;
    for (const auto& q : u.queries) {
      CHECK(asked.insert(q.pool_index).second);
      if (q.response.about_equal()) {
        ++equal;
        CHECK(q.alignment == previous);
      }
      previous = q.alignment;
    }
  }
  CHECK(equal > 0);
}

TEST_CASE("stopping rule") {
  const QueryPool& pool = PoolFor(QueryType::kStrict);
  ExperimentConfig c = Small(QueryType::kStrict, Objective::kInfoGain);

  SUBCASE("a prohibitive cost stops before the first query") {
    c.cost = CostSpec::Constant(5.0);
    for (const auto& u : RunExperiment(c, pool).users) {
      CHECK(u.stop_index == 0);
      CHECK(u.queries.empty());
    }
  }
  SUBCASE("forced queries follow the stop and are flagged") {
    c.cost = CostSpec::Constant(5.0);
    c.forced_after_stop = 3;
    for (const auto& u : RunExperiment(c, pool).users) {
      CHECK(u.stop_index == 0);
      REQUIRE(u.queries.size() == 3);
      for (const auto& q : u.queries) CHECK(q.after_stop);
    }
  }
  SUBCASE("zero cost never stops") {
    c.cost = CostSpec::Constant(0.0);
    for (const auto& u : RunExperiment(c, pool).users) {
      CHECK_FALSE(u.stop_index.has_value());
      CHECK(u.queries.size() == 6);
      for (const auto& q : u.queries) CHECK(q.r_star >= 0.0);
    }
  }
  SUBCASE("queries are asked exactly while r* is nonnegative") {
    c.cost = CostSpec::Constant(0.3);
    c.num_queries = 15;
    c.forced_after_stop = 2;
    for (const auto& u : RunExperiment(c, pool).users) {
      const int stop = u.stop_index.value_or(static_cast<int>(u.queries.size()));
      for (const auto& q : u.queries) {
        if (q.index <= stop) {
          CHECK_FALSE(q.after_stop);
          CHECK(q.r_star >= 0.0);
          CHECK(q.r_star == doctest::Approx(q.info_gain - q.cost));
        } else {
          CHECK(q.after_stop);
        }
      }
    }
  }
}

TEST_CASE("csv has one row per user-query") {
  const ExperimentConfig c = Small(QueryType::kWeak, Objective::kVolumeRemoval);
  const auto r = RunExperiment(c, PoolFor(c.query_type));
  const std::string csv = Csv(r);
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  CHECK(lines == 1 + 4 * 6);
  CHECK(csv.rfind("user,query,pool_index,response", 0) == 0);
  const auto m = Manifest(r);
  CHECK(m.at("pool").at("size") == 300);
  CHECK(m.at("users").size() == 4);
}

}  // namespace
}  // namespace infopref
