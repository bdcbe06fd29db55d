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

// Acceptance suite: one PASS/FAIL line per criterion. With arguments, runs
// only the listed criterion numbers. Exit status is nonzero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "infopref/belief.h"
#include "infopref/choice_model.h"
#include "infopref/environment.h"
#include "infopref/json_codec.h"
#include "infopref/query_selection.h"
#include "infopref/random.h"
#include "infopref/session.h"
#include "infopref/simulation.h"
#include "oracles.h"
#include "test_util.h"

namespace infopref {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

BeliefEnsemble RandomBelief(int m, int d, Rng& rng) {
  std::vector<BeliefSample> samples;
  for (int i = 0; i < m; ++i) {
    samples.push_back({RewardParams(SampleUnitSphere(d, rng)), std::nullopt});
  }
  return BeliefEnsemble(std::move(samples));
}

std::shared_ptr<const Environment> Lds() {
  static const auto env = std::make_shared<const Environment>(Environment::Create("lds"));
  return env;
}

oracle::Table ToOracle(const ProbabilityTable& t) {
  oracle::Table out(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t m = 0; m < t.rows(); ++m) {
    for (std::size_t a = 0; a < t.cols(); ++a) out[m][a] = t.prob(m, a);
  }
  return out;
}

Outcome TrivialQuery() {
  const auto start = Clock::now();
  const int m = 100;
  const double floor = m * m / 2.0;
  double vr_err = 0.0, ig_abs = 0.0, min_best_ig = 1e300;
  bool trivial_is_min = true;
  Rng rng(101);
  for (int b = 0; b < 50; ++b) {
    const auto base = QueryPool::Generate(Lds(), 1000, 2, false, DeriveSeed(7, b), 1);
    std::vector<Query> queries;
    for (std::size_t i = 0; i < base.size(); ++i) queries.push_back(base.Materialize(i));
    queries.push_back(Query::Trivial(Lds()->RandomTrajectory(DeriveSeed(8, b)), 2));
    const auto pool = QueryPool::FromQueries(std::move(queries));
    const std::size_t trivial = pool.size() - 1;
    const auto belief = RandomBelief(m, 6, rng);
    const HumanModelParams params{0.0, 1.0};

    const Selection vr = SelectQuery(pool, belief, Objective::kVolumeRemoval, params);
    trivial_is_min &= vr.index == trivial;
    vr_err = std::max(vr_err, std::abs(vr.score - floor));
    ig_abs = std::max(ig_abs, std::abs(PoolInfoGain(pool, trivial, belief, params)));
    const Selection ig = SelectQuery(pool, belief, Objective::kInfoGain, params);
    min_best_ig = std::min(min_best_ig, ig.score);
  }
  const double secs = Seconds(start);
  return {trivial_is_min && vr_err <= 1e-9 && ig_abs <= 1e-12 && min_best_ig > 0.0 &&
              secs < 60.0,
          Fmt("volume-removal argmin is trivial in all 50: %s, max |VR - M^2/2| = %.1e, "
              "max |IG(trivial)| = %.1e, smallest best IG = %.4f bits, %.1f s",
              trivial_is_min ? "yes" : "no", vr_err, ig_abs, min_best_ig, secs)};
}

Outcome Discrimination() {
  const int m = 100;
  std::vector<std::vector<double>> omegas;
  for (int i = 0; i < m; ++i) omegas.push_back({i < m / 2 ? 1.0 : -1.0, 0.0});
  const auto belief = testing::PlainBelief(omegas);
  const HumanModelParams params{0.0, 1.0};
  // Q_A: options no sample can tell apart. Q_B: each half is near-certain of
  // a different answer.
  const Query qa = testing::PairQuery({0.0, 1.0}, {0.0, -1.0});
  const Query qb = testing::PairQuery({40.0, 0.0}, {0.0, 0.0});
  const double vr_a = VolumeRemovalScore(qa, belief, params);
  const double vr_b = VolumeRemovalScore(qb, belief, params);
  const double ig_a = InfoGainScore(qa, belief, params);
  const double ig_b = InfoGainScore(qb, belief, params);

  oracle::Table clipped(m, std::vector<double>(2));
  for (int i = 0; i < m; ++i) {
    clipped[i] = i < m / 2 ? std::vector<double>{1.0 - 1e-6, 1e-6}
                           : std::vector<double>{1e-6, 1.0 - 1e-6};
  }
  const double clipped_ig = oracle::InfoGainDoubleSum(clipped);
  const double engine_clipped = InfoGainFromTable(
      ProbabilityTable::FromProbabilities(m, 2, [&] {
        std::vector<double> flat;
        for (const auto& r : clipped) flat.insert(flat.end(), r.begin(), r.end());
        return flat;
      }()));
  const bool pass = std::abs(vr_a - vr_b) <= 1e-9 && ig_b - ig_a >= 0.9 &&
                    ig_a <= 1e-9 &&
                    std::abs(clipped_ig - 0.9999786257371092) <= 1e-12 &&
                    std::abs(engine_clipped - clipped_ig) <= 1e-12;
  return {pass, Fmt("VR(A) = %.6f, VR(B) = %.6f, IG(A) = %.1e, IG(B) = %.6f, "
                    "clipped IG(B) = %.16f",
                    vr_a, vr_b, ig_a, ig_b, engine_clipped)};
}

Outcome ChoiceAlgebra() {
  Rng rng(303);
  std::uniform_real_distribution<double> reward(-5.0, 5.0), delta(0.0, 3.0),
      beta(0.1, 5.0), step(1e-3, 1.0);
  const RewardParams omega({1.0});
  double sum_err = 0.0, strict_err = 0.0;
  int not_monotone = 0;
  for (int i = 0; i < 10000; ++i) {
    const Query q = testing::PairQuery({reward(rng)}, {reward(rng)}, true);
    const Query strict_q = Query({q.option(0), q.option(1)}, false);
    const HumanModelParams p{delta(rng), beta(rng)};
    const auto dist = WeakProbs(q, omega, p);
    double total = 0.0;
    for (double x : dist.probs()) total += x;
    sum_err = std::max(sum_err, std::abs(total - 1.0));

    const auto zero = WeakProbs(q, omega, {0.0, p.beta});
    const auto strict = StrictProbs(strict_q, omega, p.beta);
    for (int k = 0; k < 2; ++k) {
      strict_err = std::max(strict_err, std::abs(zero.probs()[k] - strict.probs()[k]));
    }
    strict_err = std::max(strict_err, zero.probs()[2]);

    const auto more = WeakProbs(q, omega, {p.delta + step(rng), p.beta});
    if (!(more.probs()[2] > dist.probs()[2])) ++not_monotone;
  }
  return {sum_err <= 1e-10 && strict_err <= 1e-12 && not_monotone == 0,
          Fmt("max |sum - 1| = %.1e, max |delta=0 - strict| = %.1e, "
              "non-increasing about-equal cases = %d / 10000",
              sum_err, strict_err, not_monotone)};
}

Outcome Decomposition() {
  Rng rng(404);
  std::uniform_real_distribution<double> delta(0.0, 2.0), beta(0.2, 4.0);
  std::uniform_int_distribution<int> size(2, 200);
  const auto strict_pool = QueryPool::Generate(Lds(), 500, 2, false, 41, 1);
  const auto weak_pool = QueryPool::Generate(Lds(), 500, 2, true, 41, 1);
  double worst = 0.0;
  ProbabilityTable table;
  for (int i = 0; i < 1000; ++i) {
    const auto& pool = i % 2 ? weak_pool : strict_pool;
    const auto belief = RandomBelief(size(rng), 6, rng);
    table.Fill(pool.features(i % 500), belief, {delta(rng), beta(rng)});
    worst = std::max(worst, std::abs(InfoGainFromTable(table) -
                                     DecomposeInfoGain(table).info_gain()));
  }
  return {worst <= 1e-9, Fmt("max difference over 1000 pairs = %.1e", worst)};
}

// Runs shared by the alignment, wrong-answer and unknown-delta criteria.
struct Runs {
  std::map<std::string, ExperimentSummary> summary;
  double seconds = 0.0;
};

ExperimentConfig Desk(QueryType type, Objective objective) {
  ExperimentConfig c;
  c.query_type = type;
  c.objective = objective;
  c.num_users = 30;
  c.num_queries = 25;
  c.pool_size = 20000;
  c.rng_seed = 1;
  c.pool_seed = 1;
  return c;
}

Runs& DeskRuns() {
  static Runs runs = [] {
    Runs r;
    const auto start = Clock::now();
    for (QueryType type : {QueryType::kStrict, QueryType::kWeak}) {
      const auto pool = BuildPool(Desk(type, Objective::kInfoGain));
      for (Objective obj : {Objective::kInfoGain, Objective::kVolumeRemoval}) {
        r.summary[QueryTypeName(type) + "/" + ObjectiveName(obj)] =
            Summarize(RunExperiment(Desk(type, obj), pool));
      }
    }
    r.seconds = Seconds(start);
    return r;
  }();
  return runs;
}

Outcome AlignmentOrdering() {
  const Runs& r = DeskRuns();
  const double ig_s = r.summary.at("strict/info_gain").final_alignment;
  const double ig_w = r.summary.at("weak/info_gain").final_alignment;
  const double vr_s = r.summary.at("strict/volume_removal").final_alignment;
  const double vr_w = r.summary.at("weak/volume_removal").final_alignment;
  const bool pass = ig_s - vr_s >= 0.05 && ig_w - vr_w >= 0.05 && ig_w >= ig_s &&
                    r.seconds <= 900.0;
  return {pass, Fmt("final alignment IG strict %.3f, IG weak %.3f, VR strict %.3f, "
                    "VR weak %.3f, %.0f s",
                    ig_s, ig_w, vr_s, vr_w, r.seconds)};
}

Outcome WrongAnswers() {
  const Runs& r = DeskRuns();
  const int ig_s = r.summary.at("strict/info_gain").wrong_answers;
  const int ig_w = r.summary.at("weak/info_gain").wrong_answers;
  const int vr_s = r.summary.at("strict/volume_removal").wrong_answers;
  const int vr_w = r.summary.at("weak/volume_removal").wrong_answers;
  const bool pass = ig_s < vr_s && ig_w < vr_w && ig_w < ig_s && vr_w < vr_s;
  return {pass, Fmt("wrong answers IG strict %d, IG weak %d, VR strict %d, VR weak %d",
                    ig_s, ig_w, vr_s, vr_w)};
}

Outcome Stopping() {
  const auto start = Clock::now();
  ExperimentConfig c = Desk(QueryType::kWeak, Objective::kInfoGain);
  c.num_queries = 30;
  c.cost = CostSpec::Constant(0.0);
  const auto pool = BuildPool(c);
  const EpsilonTuning tuning = TuneEpsilon(c, pool);

  c.cost = CostSpec::Constant(tuning.epsilon);
  c.num_queries = 60;
  c.forced_after_stop = 10;
  const ExperimentResult result = RunExperiment(c, pool);
  int stopped = 0, near_optimal = 0, rule_violations = 0;
  for (const auto& u : result.users) {
    for (const auto& q : u.queries) {
      if (!q.after_stop && q.r_star < 0.0) ++rule_violations;
    }
    if (!u.stop_index) continue;
    ++stopped;
    if (!(*u.stop_r_star < 0.0)) ++rule_violations;
    const auto at_stop = static_cast<std::size_t>(*u.stop_index);
    const bool full = u.queries.size() == at_stop + 10;
    if (full && u.CumulativeReward(u.queries.size()) <= u.CumulativeReward(at_stop)) {
      ++near_optimal;
    }
  }
  const double secs = Seconds(start);
  const bool pass = stopped == 30 && near_optimal >= 24 && rule_violations == 0 &&
                    secs <= 900.0;
  return {pass, Fmt("epsilon = %.4f (%d users without a plateau excluded), stopped "
                    "%d / 30, no gain from 10 more queries in %d / 30, "
                    "rule violations %d, %.0f s",
                    tuning.epsilon, tuning.excluded, stopped, near_optimal,
                    rule_violations, secs)};
}

Outcome Submodularity() {
  Rng rng(808);
  std::uniform_real_distribution<double> feature(-3.0, 3.0), beta(0.2, 4.0),
      unit(0.05, 1.0);
  double worst = -1e300;
  double single_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto belief = RandomBelief(4, 3, rng);
    std::vector<double> prior(4, 0.25);
    const HumanModelParams params{0.0, beta(rng)};
    std::vector<oracle::Table> tables;
    double sum_single = 0.0;
    for (int q = 0; q < 2; ++q) {
      const Query query = testing::PairQuery({feature(rng), feature(rng), feature(rng)},
                                             {feature(rng), feature(rng), feature(rng)});
      ProbabilityTable t;
      t.Fill(FlatQuery(query).view(), belief, params);
      const double engine = InfoGainFromTable(t);
      tables.push_back(ToOracle(t));
      single_err = std::max(
          single_err,
          std::abs(engine - oracle::ExactMutualInformation(prior, {tables.back()})));
      sum_single += engine;
    }
    const double joint = oracle::ExactMutualInformation(prior, tables);
    worst = std::max(worst, joint - sum_single);
  }
  return {worst <= 1e-12 && single_err <= 1e-12,
          Fmt("max I(q1,q2) - I(q1) - I(q2) = %.3e over 100 instances, "
              "single-query agreement %.1e",
              worst, single_err)};
}

Outcome UnknownDelta() {
  const auto start = Clock::now();
  const double strict = DeskRuns().summary.at("strict/info_gain").final_alignment;
  ExperimentConfig c = Desk(QueryType::kWeakUnknownDelta, Objective::kInfoGain);
  c.user_delta_range = {0.0, 2.0};
  const double joint = Summarize(RunExperiment(c)).final_alignment;
  return {joint >= strict - 0.02,
          Fmt("final alignment weak with learned delta %.4f, strict %.4f, %.0f s",
              joint, strict, Seconds(start))};
}

Outcome ServiceDeterminism() {
  testing::TempDir live_dir, replay_dir;
  const Json request = {{"environment", "lds"}, {"mode", "weak"},
                        {"objective", "info_gain"},
                        {"cost", {{"kind", "constant"}, {"epsilon", 0.0}}},
                        {"budget", 20}, {"seed", 2026}};
  const char* script[] = {"A", "B", "about_equal", "A", "A",
                          "B", "about_equal", "B", "A", "B"};
  SessionEngine live({live_dir.path(), 1});
  const std::string id = live.Create(request).at("id");
  std::vector<std::string> pending;
  for (int v = 1; v <= 10; ++v) {
    pending.push_back(live.Get(id).at("pending").dump());
    live.Submit(id, v, ParseAnswer(script[v - 1]));
  }
  pending.push_back(live.Get(id).at("pending").dump());
  const std::string live_state = live.Get(id).dump();
  const std::string live_estimate = live.Estimate(id).dump();

  std::ifstream in(live_dir.path() / (id + ".json"));
  std::stringstream text;
  text << in.rdbuf();
  SessionEngine other({replay_dir.path(), 1});
  Json replayed = other.Replay(ParseJson(text.str()));
  const std::string replay_estimate = replayed.at("estimate").dump();
  replayed.erase("estimate");
  WriteFileAtomic(replay_dir.path() / (id + ".json"), replayed.dump());
  const std::string replay_state = other.Get(id).dump();

  // Step-by-step pending queries from an independent replay of prefixes.
  int prefix_mismatch = 0;
  Json doc = ParseJson(text.str());
  for (std::size_t k = 0; k <= 10; ++k) {
    Json prefix = doc;
    prefix["history"] = Json(std::vector<Json>(doc["history"].begin(),
                                               doc["history"].begin() + k));
    const Json r = other.Replay(prefix);
    if (r.at("pending") != ParseJson(pending[k]).at("pool_index")) ++prefix_mismatch;
  }
  const bool pass = live_state == replay_state && live_estimate == replay_estimate &&
                    prefix_mismatch == 0;
  return {pass, Fmt("state identical: %s, estimate identical: %s, pending queries "
                    "matched at %d / 11 steps",
                    live_state == replay_state ? "yes" : "no",
                    live_estimate == replay_estimate ? "yes" : "no",
                    11 - prefix_mismatch)};
}

}  // namespace
}  // namespace infopref

int main(int argc, char** argv) {
  using namespace infopref;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"trivial query degeneracy", TrivialQuery},
      {"info gain separates queries volume removal ties", Discrimination},
      {"weak choice model algebra", ChoiceAlgebra},
      {"info gain decomposition identity", Decomposition},
      {"alignment ordering on LDS", AlignmentOrdering},
      {"wrong-answer ordering", WrongAnswers},
      {"optimal stopping with tuned epsilon", Stopping},
      {"two-query submodularity", Submodularity},
      {"unknown delta learned jointly", UnknownDelta},
      {"session replay determinism", ServiceDeterminism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
