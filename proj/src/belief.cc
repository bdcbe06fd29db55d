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

#include "infopref/belief.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "infopref/errors.h"
#include "infopref/random.h"

namespace infopref {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// History flattened for the sampler's inner loop.
class CompiledHistory {
 public:
  explicit CompiledHistory(const InteractionHistory& history) {
    for (const auto& e : history.entries()) {
      Item item;
      item.num_options = e.query.num_options();
      item.weak = e.query.weak();
      item.answer = e.response.AnswerIndex(item.num_options);
      item.offset = features_.size();
      for (const auto& t : e.query.options()) {
        features_.insert(features_.end(), t.features.values().begin(),
                         t.features.values().end());
      }
      if (dim_ == 0) dim_ = e.query.feature_dim();
      Require(e.query.feature_dim() == dim_,
              "history mixes feature dimensions");
      items_.push_back(item);
    }
  }

  std::size_t dim() const { return dim_; }

  double LogLikelihood(std::span<const double> omega,
                       const HumanModelParams& params) const {
    double total = 0.0;
    double rewards[8];
    double log_probs[9];
    std::vector<double> wide_rewards, wide_log_probs;
    for (const auto& item : items_) {
      std::span<double> r(rewards, item.num_options);
      std::span<double> lp(log_probs, item.num_options + (item.weak ? 1 : 0));
      if (item.num_options > 8) {
        wide_rewards.resize(item.num_options);
        wide_log_probs.resize(item.num_options);
        r = wide_rewards;
        lp = wide_log_probs;
      }
      for (int k = 0; k < item.num_options; ++k) {
        r[k] = Dot(omega, {features_.data() + item.offset + k * dim_, dim_});
      }
      if (item.weak) {
        WeakLogProbs(r[0], r[1], params, lp);
      } else {
        StrictLogProbs(r, params.beta, lp);
      }
      total += lp[item.answer];
      if (total == kNegInf) return kNegInf;
    }
    return total;
  }

 private:
  struct Item {
    int num_options = 0;
    bool weak = false;
    int answer = 0;
    std::size_t offset = 0;
  };
  std::vector<Item> items_;
  std::vector<double> features_;
  std::size_t dim_ = 0;
};

void ProjectToSphere(std::vector<double>& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
}

}  // namespace

void InteractionHistory::Append(Query query, QueryResponse response) {
  Require(response.ValidFor(query), "response is not valid for its query");
  if (!entries_.empty()) {
    Require(query.feature_dim() == entries_.front().query.feature_dim(),
            "history mixes feature dimensions");
  }
  entries_.push_back({std::move(query), response});
}

void SamplerConfig::Validate() const {
  Require(feature_dim >= 1, "sampler needs feature_dim >= 1");
  Require(num_samples >= 2, "sampler needs M >= 2");
  Require(burn_in >= 0 && thinning >= 0, "burn-in and thinning must be >= 0");
  Require(proposal_scale > 0.0 && delta_proposal_scale > 0.0,
          "proposal scales must be > 0");
  Require(delta_prior.lo >= 0.0 && delta_prior.hi > delta_prior.lo,
          "delta prior must be a nonempty interval in [0, inf)");
  model.Validate();
}

nlohmann::json SamplerConfig::ToJson() const {
  return {{"num_samples", num_samples},
          {"burn_in", burn_in},
          {"thinning", thinning},
          {"proposal_scale", proposal_scale},
          {"delta_proposal_scale", delta_proposal_scale},
          {"delta_prior", {delta_prior.lo, delta_prior.hi}},
          {"model", {{"delta", model.delta}, {"beta", model.beta}}}};
}

SamplerConfig SamplerConfig::FromJson(const nlohmann::json& j,
                                      const SamplerConfig& base) {
  Require(j.is_object(), "sampler config must be an object");
  SamplerConfig c = base;
  try {
    c.num_samples = j.value("num_samples", c.num_samples);
    c.burn_in = j.value("burn_in", c.burn_in);
    c.thinning = j.value("thinning", c.thinning);
    c.proposal_scale = j.value("proposal_scale", c.proposal_scale);
    c.delta_proposal_scale =
        j.value("delta_proposal_scale", c.delta_proposal_scale);
    if (j.contains("delta_prior")) {
      const auto& p = j.at("delta_prior");
      c.delta_prior = {p.at(0).get<double>(), p.at(1).get<double>()};
    }
    if (j.contains("model")) {
      const auto& m = j.at("model");
      c.model.delta = m.value("delta", c.model.delta);
      c.model.beta = m.value("beta", c.model.beta);
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed sampler config: ") + e.what());
  }
  return c;
}

double LogPosterior(const RewardParams& omega, const HumanModelParams& params,
                    const InteractionHistory& history) {
  double total = 0.0;
  for (const auto& e : history.entries()) {
    total += LogLikelihood(e.response, e.query, omega, params);
    if (total == kNegInf) return kNegInf;
  }
  return total;
}

BeliefEnsemble SampleBelief(const SamplerConfig& config,
                            const InteractionHistory& history) {
  config.Validate();
  const CompiledHistory compiled(history);
  Require(history.empty() ||
              compiled.dim() == static_cast<std::size_t>(config.feature_dim),
          "sampler feature_dim does not match the history");
  const int d = config.feature_dim;

  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Interval& prior = config.delta_prior;

  std::vector<double> omega = SampleUnitSphere(d, rng);
  HumanModelParams params = config.model;
  if (config.joint) {
    params.delta = std::uniform_real_distribution<double>(prior.lo, prior.hi)(rng);
  }
  double log_post = compiled.LogLikelihood(omega, params);

  std::vector<double> proposal(d);
  auto step = [&] {
    for (int i = 0; i < d; ++i) {
      proposal[i] = omega[i] + config.proposal_scale * normal(rng);
    }
    ProjectToSphere(proposal);
    HumanModelParams proposed_params = params;
    if (config.joint) {
      proposed_params.delta =
          std::abs(params.delta + config.delta_proposal_scale * normal(rng));
    }
    // Draw the acceptance uniform unconditionally so the stream layout does
    // not depend on the branch taken.
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (config.joint && !prior.Contains(proposed_params.delta)) return;
    const double proposed = compiled.LogLikelihood(proposal, proposed_params);
    if (proposed == kNegInf) return;
    if (log_post == kNegInf || std::log(u) < proposed - log_post) {
      omega.swap(proposal);
      params = proposed_params;
      log_post = proposed;
    }
  };

  for (int i = 0; i < config.burn_in; ++i) step();
  const int stride = std::max(config.thinning, 1);
  std::vector<BeliefSample> samples;
  samples.reserve(config.num_samples);
  for (int m = 0; m < config.num_samples; ++m) {
    for (int i = 0; i < stride; ++i) step();
    // Renormalize so accumulated rounding never breaks the unit-norm check.
    std::vector<double> w = omega;
    ProjectToSphere(w);
    samples.push_back({RewardParams(std::move(w)),
                       config.joint ? std::optional(params) : std::nullopt});
  }
  return BeliefEnsemble(std::move(samples));
}

double Alignment(const BeliefEnsemble& belief, std::span<const double> truth) {
  Require(truth.size() == belief.dim(), "alignment dimension mismatch");
  const double truth_norm = std::sqrt(Dot(truth, truth));
  Require(truth_norm > 0.0, "alignment against a zero vector");
  double total = 0.0;
  for (const auto& s : belief.samples()) {
    const auto w = s.omega.omega();
    total += Dot(w, truth) / (truth_norm * std::sqrt(Dot(w, w)));
  }
  return total / static_cast<double>(belief.size());
}

double Alignment(const BeliefEnsemble& belief, const RewardParams& truth) {
  return Alignment(belief, truth.omega());
}

std::vector<double> MeanOmega(const BeliefEnsemble& belief) {
  std::vector<double> mean(belief.dim(), 0.0);
  for (const auto& s : belief.samples()) {
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s.omega.omega()[i];
  }
  for (double& v : mean) v /= static_cast<double>(belief.size());
  return mean;
}

}  // namespace infopref
