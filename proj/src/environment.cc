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

#include "infopref/environment.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "infopref/errors.h"
#include "infopref/json_codec.h"
#include "infopref/random.h"

namespace infopref {
namespace {

constexpr int kLdsStateDim = 6;
constexpr int kLdsActionDim = 3;
constexpr double kLdsSpectralRadius = 0.95;

EnvironmentSpec BaseSpec(std::string_view env_id) {
  EnvironmentSpec spec;
  spec.env_id = std::string(env_id);
  if (env_id == "lds") {
    spec.kind = EnvironmentKind::kLds;
    spec.state_dim = kLdsStateDim;
    spec.action_dim = kLdsActionDim;
    spec.epochs = 5;
    spec.steps_per_epoch = 10;
    spec.feature_dim = kLdsStateDim;
    spec.dt = 1.0;
  } else if (env_id == "driver") {
    spec.kind = EnvironmentKind::kDriver;
    spec.state_dim = 6;
    spec.action_dim = 2;  // steering, acceleration
    spec.epochs = 5;
    spec.steps_per_epoch = 10;
    spec.feature_dim = 4;
    spec.dt = driver::kDt;
  } else {
    Fail(ErrorCode::kInvalidArgument,
         "unknown environment '" + std::string(env_id) + "'");
  }
  spec.action_bounds.assign(spec.action_dim, Interval{-1.0, 1.0});
  spec.feature_scale.assign(spec.feature_dim, 1.0);
  return spec;
}

Matrix SimulateLds(const EnvironmentSpec& spec, const Matrix& a,
                   const Matrix& b, const Matrix& actions) {
  const int n = spec.state_dim;
  Matrix states(spec.timesteps(), n);
  std::vector<double> x(n, 0.0), next(n);
  int t = 0;
  for (int e = 0; e < spec.epochs; ++e) {
    const auto u = actions.row(e);
    for (int s = 0; s < spec.steps_per_epoch; ++s, ++t) {
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += a(i, j) * x[j];
        for (int j = 0; j < spec.action_dim; ++j) acc += b(i, j) * u[j];
        next[i] = acc;
      }
      x.swap(next);
      std::copy(x.begin(), x.end(), states.row(t).begin());
    }
  }
  return states;
}

Matrix SimulateDriver(const EnvironmentSpec& spec, const Matrix& actions) {
  using namespace driver;
  Matrix states(spec.timesteps(), spec.state_dim);
  double x = kEgoStart[0], y = kEgoStart[1], heading = kEgoStart[2],
         speed = kEgoStart[3];
  const double dt = spec.dt;
  int t = 0;
  for (int e = 0; e < spec.epochs; ++e) {
    const double steer = actions(e, 0);
    const double accel = actions(e, 1);
    for (int s = 0; s < spec.steps_per_epoch; ++s, ++t) {
      const double nx = x + speed * std::cos(heading) * dt;
      const double ny = y + speed * std::sin(heading) * dt;
      const double nh = heading + speed * steer * dt;
      const double nv = speed + (accel - kFriction * speed) * dt;
      x = nx;
      y = ny;
      heading = nh;
      speed = nv;
      auto row = states.row(t);
      row[kX] = x;
      row[kY] = y;
      row[kHeading] = heading;
      row[kSpeed] = speed;
      row[kOtherX] = kOtherStart[0];
      row[kOtherY] = kOtherStart[1] + kOtherSpeed * dt * (t + 1);
    }
  }
  return states;
}

}  // namespace

std::vector<double> DriverFeatures(const Matrix& states) {
  using namespace driver;
  Require(states.rows > 0 && states.cols == 6,
          "driver features need a T x 6 state sequence");
  std::vector<double> f(4, 0.0);
  for (std::size_t t = 0; t < states.rows; ++t) {
    const auto s = states.row(t);
    double lane_gap = std::abs(s[kX] - kLaneCenters[0]);
    for (double c : kLaneCenters) lane_gap = std::min(lane_gap, std::abs(s[kX] - c));
    const double dx = s[kX] - s[kOtherX];
    const double dy = s[kY] - s[kOtherY];
    f[0] += std::exp(-kLaneWeight * lane_gap * lane_gap);
    f[1] += (s[kSpeed] - 1.0) * (s[kSpeed] - 1.0);
    f[2] += std::cos(s[kHeading] - kRoadHeading);
    f[3] += std::exp(-kLateralWeight * dx * dx - kLongitudinalWeight * dy * dy);
  }
  for (double& v : f) v /= static_cast<double>(states.rows);
  return f;
}

std::vector<double> LdsFeatures(const Matrix& states) {
  Require(states.rows > 0, "empty state sequence");
  std::vector<double> f(states.cols, 0.0);
  for (std::size_t t = 0; t < states.rows; ++t) {
    const auto s = states.row(t);
    for (std::size_t i = 0; i < states.cols; ++i) f[i] += s[i] * s[i];
  }
  for (double& v : f) v /= static_cast<double>(states.rows);
  return f;
}

std::vector<double> FeatureStdDev(std::span<const std::vector<double>> raw) {
  Require(raw.size() >= 2, "need at least two samples to fit a normalizer");
  const std::size_t d = raw.front().size();
  std::vector<double> mean(d, 0.0), m2(d, 0.0);
  // Welford.
  for (std::size_t n = 0; n < raw.size(); ++n) {
    Require(raw[n].size() == d, "feature samples have different dimensions");
    for (std::size_t i = 0; i < d; ++i) {
      const double delta = raw[n][i] - mean[i];
      mean[i] += delta / static_cast<double>(n + 1);
      m2[i] += delta * (raw[n][i] - mean[i]);
    }
  }
  std::vector<double> sd(d);
  for (std::size_t i = 0; i < d; ++i) {
    sd[i] = std::sqrt(m2[i] / static_cast<double>(raw.size() - 1));
    if (!(sd[i] > 0.0) || !std::isfinite(sd[i])) {
      Fail(ErrorCode::kInvalidArgument,
           "degenerate feature " + std::to_string(i) + ": zero variance");
    }
  }
  return sd;
}

Environment::Environment(EnvironmentSpec spec) : spec_(std::move(spec)) {
  BuildDynamics();
}

void Environment::BuildDynamics() {
  if (spec_.kind != EnvironmentKind::kLds) return;
  const int n = spec_.state_dim;
  const int m = spec_.action_dim;
  Rng rng(spec_.dynamics_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  const double radius = a.eigenvalues().cwiseAbs().maxCoeff();
  a *= kLdsSpectralRadius / radius;
  lds_a_ = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lds_a_(i, j) = a(i, j);
  lds_b_ = Matrix(n, m);
  for (double& v : lds_b_.data) v = normal(rng);
}

Environment Environment::Create(std::string_view env_id,
                                const EnvironmentOptions& options) {
  EnvironmentSpec spec = BaseSpec(env_id);
  spec.dynamics_seed =
      spec.kind == EnvironmentKind::kLds ? options.dynamics_seed : 0;
  spec.normalizer_samples = options.normalizer_samples;
  spec.normalizer_seed = options.normalizer_seed;
  Environment env(std::move(spec));
  return env.WithFeatureScale(
      env.FitNormalizer(options.normalizer_samples, options.normalizer_seed));
}

Environment Environment::FromConfig(const nlohmann::json& config) {
  try {
    EnvironmentSpec spec = BaseSpec(config.at("env_id").get<std::string>());
    spec.dynamics_seed = config.at("dynamics_seed").get<std::uint64_t>();
    spec.normalizer_samples = config.at("normalizer_samples").get<int>();
    spec.normalizer_seed = config.at("normalizer_seed").get<std::uint64_t>();
    Require(config.at("state_dim").get<int>() == spec.state_dim &&
                config.at("action_dim").get<int>() == spec.action_dim &&
                config.at("epochs").get<int>() == spec.epochs &&
                config.at("steps_per_epoch").get<int>() == spec.steps_per_epoch &&
                config.at("feature_dim").get<int>() == spec.feature_dim,
            "environment config does not match the built-in dimensions");
    spec.action_bounds.clear();
    for (const auto& b : config.at("action_bounds")) {
      spec.action_bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    }
    Require(static_cast<int>(spec.action_bounds.size()) == spec.action_dim,
            "action bounds do not match the action dimension");
    for (const auto& b : spec.action_bounds) {
      Require(b.lo <= b.hi, "action bound interval is empty");
    }
    Environment env(std::move(spec));
    return env.WithFeatureScale(
        config.at("feature_scale").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed environment config: ") + e.what());
  }
}

Environment Environment::Load(const nlohmann::json& request) {
  if (request.is_string()) return Create(request.get<std::string>());
  Require(request.is_object() && request.contains("env_id"),
          "environment request needs an env_id");
  if (request.contains("feature_scale")) return FromConfig(request);
  EnvironmentOptions options;
  try {
    options.dynamics_seed =
        request.value("dynamics_seed", options.dynamics_seed);
    options.normalizer_samples =
        request.value("normalizer_samples", options.normalizer_samples);
    options.normalizer_seed =
        request.value("normalizer_seed", options.normalizer_seed);
    return Create(request.at("env_id").get<std::string>(), options);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed environment request: ") + e.what());
  }
}

nlohmann::json Environment::Config() const {
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : spec_.action_bounds) bounds.push_back({b.lo, b.hi});
  return {
      {"env_id", spec_.env_id},
      {"state_dim", spec_.state_dim},
      {"action_dim", spec_.action_dim},
      {"epochs", spec_.epochs},
      {"steps_per_epoch", spec_.steps_per_epoch},
      {"feature_dim", spec_.feature_dim},
      {"dt", spec_.dt},
      {"action_bounds", bounds},
      {"feature_scale", spec_.feature_scale},
      {"dynamics_seed", spec_.dynamics_seed},
      {"normalizer_samples", spec_.normalizer_samples},
      {"normalizer_seed", spec_.normalizer_seed},
  };
}

std::string Environment::Fingerprint() const { return ContentHash(Config().dump()); }

void Environment::CheckActions(const Matrix& actions) const {
  Require(actions.rows == static_cast<std::size_t>(spec_.epochs) &&
              actions.cols == static_cast<std::size_t>(spec_.action_dim),
          "action matrix must be " + std::to_string(spec_.epochs) + " x " +
              std::to_string(spec_.action_dim));
  for (std::size_t e = 0; e < actions.rows; ++e) {
    for (std::size_t j = 0; j < actions.cols; ++j) {
      const double u = actions(e, j);
      if (!spec_.action_bounds[j].Contains(u)) {
        Fail(ErrorCode::kInvalidArgument,
             "action (" + std::to_string(e) + ", " + std::to_string(j) +
                 ") = " + std::to_string(u) + " is out of bounds");
      }
    }
  }
}

Matrix Environment::Simulate(const Matrix& actions) const {
  CheckActions(actions);
  if (spec_.kind == EnvironmentKind::kLds) {
    return SimulateLds(spec_, lds_a_, lds_b_, actions);
  }
  return SimulateDriver(spec_, actions);
}

std::vector<double> Environment::RawFeatures(const Matrix& states) const {
  return spec_.kind == EnvironmentKind::kLds ? LdsFeatures(states)
                                             : DriverFeatures(states);
}

FeatureVector Environment::Normalize(std::span<const double> raw) const {
  Require(raw.size() == spec_.feature_scale.size(),
          "raw feature dimension mismatch");
  std::vector<double> f(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) f[i] = raw[i] / spec_.feature_scale[i];
  return FeatureVector(std::move(f));
}

Trajectory Environment::Rollout(const Matrix& actions) const {
  Trajectory t;
  t.env_id = spec_.env_id;
  t.states = Simulate(actions);
  t.features = Normalize(RawFeatures(t.states));
  t.actions = actions;
  return t;
}

Matrix Environment::RandomActions(std::uint64_t seed) const {
  Rng rng(seed);
  Matrix actions(spec_.epochs, spec_.action_dim);
  for (int e = 0; e < spec_.epochs; ++e) {
    for (int j = 0; j < spec_.action_dim; ++j) {
      const auto& b = spec_.action_bounds[j];
      actions(e, j) = std::uniform_real_distribution<double>(b.lo, b.hi)(rng);
    }
  }
  return actions;
}

Trajectory Environment::RandomTrajectory(std::uint64_t seed) const {
  return Rollout(RandomActions(seed));
}

std::vector<double> Environment::FitNormalizer(int sample_count,
                                               std::uint64_t seed) const {
  Require(sample_count >= 2, "normalizer needs at least two samples");
  std::vector<std::vector<double>> raw;
  raw.reserve(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    raw.push_back(RawFeatures(Simulate(RandomActions(DeriveSeed(seed, i)))));
  }
  return FeatureStdDev(raw);
}

Environment Environment::WithFeatureScale(std::vector<double> scale) const {
  Require(static_cast<int>(scale.size()) == spec_.feature_dim,
          "feature scale has the wrong dimension");
  for (double s : scale) {
    Require(std::isfinite(s) && s > 0.0, "feature scale must be positive");
  }
  Environment env = *this;
  env.spec_.feature_scale = std::move(scale);
  return env;
}

}  // namespace infopref
