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

// Rollout dynamics and trajectory features for the LDS and Driver
// environments.
//
// LDS: x_{t+1} = A x_t + B u_t with a 6-d state and 3-d action, A and B drawn
// from a fixed seed and A rescaled to spectral radius 0.95. Features are the
// trajectory averages of the squared state coordinates.
//
// Driver: Euler-integrated unicycle (x, y, heading, speed) on a three-lane
// road pointing along +y, sharing the road with a scripted car in the middle
// lane. Features are the four trajectory averages listed with DriverFeatures.
//
// Features are divided by per-feature standard deviations measured under
// uniformly random actions, so every feature has unit variance.

#ifndef INFOPREF_ENVIRONMENT_H_
#define INFOPREF_ENVIRONMENT_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "infopref/types.h"

namespace infopref {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool Contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class EnvironmentKind { kLds, kDriver };

struct EnvironmentSpec {
  std::string env_id;
  EnvironmentKind kind = EnvironmentKind::kLds;
  int state_dim = 0;
  int action_dim = 0;
  int epochs = 0;           // control decisions per trajectory
  int steps_per_epoch = 0;  // timesteps each decision is held for
  int feature_dim = 0;
  double dt = 0.0;
  std::vector<Interval> action_bounds;
  std::vector<double> feature_scale;  // normalizer std devs, all > 0
  std::uint64_t dynamics_seed = 0;
  int normalizer_samples = 0;
  std::uint64_t normalizer_seed = 0;

  int timesteps() const { return epochs * steps_per_epoch; }
};

namespace driver {
inline constexpr double kDt = 0.1;
inline constexpr double kFriction = 1.0;
inline constexpr double kLaneCenters[] = {-0.17, 0.0, 0.17};
inline constexpr double kRoadHeading = 1.5707963267948966;  // +y
inline constexpr double kLaneWeight = 30.0;                 // c1
inline constexpr double kLateralWeight = 7.0;               // c2
inline constexpr double kLongitudinalWeight = 3.0;          // c3
// Ego starts in the middle lane at rest, behind the other car.
inline constexpr double kEgoStart[] = {0.0, -0.3, kRoadHeading, 0.0};
inline constexpr double kOtherStart[] = {0.0, 0.1};
inline constexpr double kOtherSpeed = 0.2;
// State columns.
enum Column { kX = 0, kY, kHeading, kSpeed, kOtherX, kOtherY };
}  // namespace driver

inline constexpr std::uint64_t kDefaultLdsDynamicsSeed = 48;
inline constexpr std::uint64_t kDefaultNormalizerSeed = 0xa11ce5ULL;
inline constexpr int kDefaultNormalizerSamples = 10000;

struct EnvironmentOptions {
  std::uint64_t dynamics_seed = kDefaultLdsDynamicsSeed;
  int normalizer_samples = kDefaultNormalizerSamples;
  std::uint64_t normalizer_seed = kDefaultNormalizerSeed;
};

class Environment {
 public:
  // Builds "lds" or "driver" and fits its normalizer.
  static Environment Create(std::string_view env_id,
                            const EnvironmentOptions& options = {});
  // Rebuilds an environment from its JSON sidecar without refitting.
  static Environment FromConfig(const nlohmann::json& config);

  // Accepts a full Config() document, an object with "env_id" and optional
  // dynamics_seed / normalizer_samples / normalizer_seed, or a bare id string.
  static Environment Load(const nlohmann::json& request);
  nlohmann::json Config() const;
  // Content hash of Config(); pools and sessions record it.
  std::string Fingerprint() const;

  const EnvironmentSpec& spec() const { return spec_; }
  const std::string& id() const { return spec_.env_id; }

  // State sequence (timesteps x state_dim) after each step.
  Matrix Simulate(const Matrix& actions) const;
  std::vector<double> RawFeatures(const Matrix& states) const;
  FeatureVector Normalize(std::span<const double> raw) const;
  Trajectory Rollout(const Matrix& actions) const;

  Matrix RandomActions(std::uint64_t seed) const;
  Trajectory RandomTrajectory(std::uint64_t seed) const;

  // Standard deviation of each raw feature over `sample_count` random
  // trajectories.
  std::vector<double> FitNormalizer(int sample_count, std::uint64_t seed) const;
  Environment WithFeatureScale(std::vector<double> scale) const;

  const Matrix& lds_a() const { return lds_a_; }
  const Matrix& lds_b() const { return lds_b_; }

 private:
  explicit Environment(EnvironmentSpec spec);
  void BuildDynamics();
  void CheckActions(const Matrix& actions) const;

  EnvironmentSpec spec_;
  Matrix lds_a_;
  Matrix lds_b_;
};

// Raw (unnormalized) Driver features from a Driver state sequence:
//   mean exp(-c1 d1^2), d1 = distance to the closest lane center
//   mean (v - 1)^2
//   mean cos(heading - road heading)
//   mean exp(-c2 d2^2 - c3 d3^2), d2/d3 = lateral/longitudinal gap to the
//   other car
std::vector<double> DriverFeatures(const Matrix& states);

// Raw LDS features: trajectory average of each squared state coordinate.
std::vector<double> LdsFeatures(const Matrix& states);

// Per-column sample standard deviation. Fails on a zero-variance column.
std::vector<double> FeatureStdDev(std::span<const std::vector<double>> raw);

}  // namespace infopref

#endif  // INFOPREF_ENVIRONMENT_H_
