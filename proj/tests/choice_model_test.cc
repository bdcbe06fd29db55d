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

#include <array>
#include <cmath>
#include <random>

#include "infopref/choice_model.h"
#include "infopref/errors.h"
#include "infopref/random.h"
#include "test_util.h"

namespace infopref {
namespace {

using testing::FeatureTrajectory;
using testing::GapQuery;

const RewardParams kAxis({1.0, 0.0});

TEST_CASE("strict probabilities for equal rewards") {
  const auto dist = StrictProbs(GapQuery(0.0), kAxis, 1.0);
  CHECK(dist.probs()[0] == doctest::Approx(0.5));
  CHECK(dist.probs()[1] == doctest::Approx(0.5));
}

TEST_CASE("strict probabilities for a unit reward gap") {
  const auto dist = StrictProbs(GapQuery(1.0), kAxis, 1.0);
  CHECK(std::abs(dist.probs()[0] - 0.731059) <= 1e-6);
  CHECK(std::abs(dist.probs()[1] - 0.268941) <= 1e-6);
}

TEST_CASE("three identical options are uniform") {
  const auto t = FeatureTrajectory({0.4, 0.1});
  const auto dist = StrictProbs(Query({t, t, t}, false), kAxis, 2.0);
  for (double p : dist.probs()) CHECK(p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("weak model with delta zero is the strict model") {
  Rng rng(1);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Query weak = testing::PairQuery({uni(rng), uni(rng)}, {uni(rng), uni(rng)}, true);
    const Query strict(weak.options(), false);
    const RewardParams w(SampleUnitSphere(2, rng));
    const double beta = 0.1 + 3.0 * std::abs(uni(rng));
    const auto wp = WeakProbs(weak, w, {0.0, beta});
    const auto sp = StrictProbs(strict, w, beta);
    CHECK(std::abs(wp.probs()[0] - sp.probs()[0]) <= 1e-12);
    CHECK(std::abs(wp.probs()[1] - sp.probs()[1]) <= 1e-12);
    CHECK(wp.probs()[2] <= 1e-12);
  }
}

TEST_CASE("weak model at delta one with equal rewards") {
  const auto dist = WeakProbs(GapQuery(0.0, true), kAxis, {1.0, 1.0});
  CHECK(dist.probs()[0] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
  CHECK(dist.probs()[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
  CHECK(dist.probs()[2] == doctest::Approx(0.4621171572600096).epsilon(1e-12));
  CHECK(std::abs(dist.probs()[0] + dist.probs()[1] + dist.probs()[2] - 1.0) <= 1e-12);
}

TEST_CASE("weak model with a dominant option") {
  const auto dist = WeakProbs(GapQuery(200.0, true), kAxis, {1.0, 1.0});
  CHECK(dist.probs()[0] == doctest::Approx(1.0));
  CHECK(dist.probs()[1] < 1e-80);
}

TEST_CASE("strict probabilities are normalized and shift invariant") {
  Rng rng(2);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const int k = 2 + i % 4;
    std::vector<double> r(k), shifted(k), lp(k), lps(k);
    const double shift = normal(rng) * 10.0;
    for (int j = 0; j < k; ++j) {
      r[j] = normal(rng);
      shifted[j] = r[j] + shift;
    }
    const double beta = 0.05 + std::abs(normal(rng));
    StrictLogProbs(r, beta, lp);
    StrictLogProbs(shifted, beta, lps);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
      total += std::exp(lp[j]);
      CHECK(std::abs(std::exp(lp[j]) - std::exp(lps[j])) <= 1e-10);
    }
    CHECK(std::abs(total - 1.0) <= 1e-10);
  }
}

TEST_CASE("weak probabilities are normalized and monotone in delta") {
  Rng rng(3);
  std::uniform_real_distribution<double> reward(-5.0, 5.0), delta(0.0, 5.0),
      beta(1e-3, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double r1 = reward(rng), r2 = reward(rng), b = beta(rng);
    const double d = delta(rng);
    std::array<double, 3> lp{}, lp2{};
    WeakLogProbs(r1, r2, {d, b}, lp);
    CHECK(std::abs(std::exp(lp[0]) + std::exp(lp[1]) + std::exp(lp[2]) - 1.0) <= 1e-10);
    WeakLogProbs(r1, r2, {d + 0.1, b}, lp2);
    CHECK(lp2[0] < lp[0]);
    CHECK(lp2[1] < lp[1]);
    CHECK(lp2[2] > lp[2]);
  }
}

TEST_CASE("permuting options permutes probabilities") {
  const auto a = FeatureTrajectory({0.3, 1.0});
  const auto b = FeatureTrajectory({-0.7, 0.2});
  const auto c = FeatureTrajectory({1.1, -0.4});
  const RewardParams w = RewardParams::FromDirection({0.4, 0.9});
  const auto abc = StrictProbs(Query({a, b, c}, false), w, 1.3);
  const auto cab = StrictProbs(Query({c, a, b}, false), w, 1.3);
  CHECK(abc.probs()[0] == doctest::Approx(cab.probs()[1]));
  CHECK(abc.probs()[1] == doctest::Approx(cab.probs()[2]));
  CHECK(abc.probs()[2] == doctest::Approx(cab.probs()[0]));
  const auto ab = WeakProbs(Query({a, b}, true), w, {0.8, 1.0});
  const auto ba = WeakProbs(Query({b, a}, true), w, {0.8, 1.0});
  CHECK(ab.probs()[0] == doctest::Approx(ba.probs()[1]));
  CHECK(ab.probs()[2] == doctest::Approx(ba.probs()[2]));
}

TEST_CASE("sampling a point mass") {
  const ChoiceDistribution dist({1.0, 0.0}, 2, false);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    CHECK(SampleResponse(dist, s).option() == 0);
  }
}

TEST_CASE("sampled frequencies match the distribution") {
  const ChoiceDistribution dist({0.2, 0.3, 0.5}, 2, true);
  Rng rng(4);
  std::array<int, 3> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    ++counts[SampleResponse(dist, rng).AnswerIndex(2)];
  }
  for (int a = 0; a < 3; ++a) {
    CHECK(std::abs(counts[a] / static_cast<double>(n) - dist.probs()[a]) <= 0.01);
  }
  CHECK(SampleResponse(dist, 77) == SampleResponse(dist, 77));
}

TEST_CASE("log likelihood") {
  CHECK(LogLikelihood(QueryResponse::Option(0), GapQuery(0.0), kAxis, {0.0, 1.0}) ==
        doctest::Approx(-0.6931471805599453));
  CHECK_THROWS_AS(
      LogLikelihood(QueryResponse::AboutEqual(), GapQuery(0.0), kAxis, {1.0, 1.0}),
      Error);
  // Product of probabilities equals the sum of logs.
  double product = 1.0, sum = 0.0;
  for (double gap : {0.3, -1.2, 2.0, 0.0}) {
    const auto q = GapQuery(gap, true);
    const auto r = QueryResponse::Option(gap > 0 ? 0 : 1);
    product *= WeakProbs(q, kAxis, {1.0, 1.0}).Probability(r);
    sum += LogLikelihood(r, q, kAxis, {1.0, 1.0});
  }
  CHECK(std::abs(std::log(product) - sum) <= 1e-12);
  // Weak at delta zero agrees with strict on option answers.
  for (double gap : {0.5, -2.0}) {
    for (int k : {0, 1}) {
      CHECK(LogLikelihood(QueryResponse::Option(k), GapQuery(gap, true), kAxis,
                          {0.0, 1.0}) ==
            doctest::Approx(LogLikelihood(QueryResponse::Option(k), GapQuery(gap),
                                          kAxis, {0.0, 1.0}))
                .epsilon(1e-14));
    }
  }
}

}  // namespace
}  // namespace infopref
