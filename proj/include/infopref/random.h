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

#ifndef INFOPREF_RANDOM_H_
#define INFOPREF_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace infopref {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for (base, a, b). Every random draw in the library
// goes through a seed derived this way so results depend only on the seeds
// the caller stores.
constexpr std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a,
                                   std::uint64_t b = 0) {
  return MixSeed(MixSeed(MixSeed(base) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

// Uniform draw from the unit sphere in R^d.
inline std::vector<double> SampleUnitSphere(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(d);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = normal(rng);
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

}  // namespace infopref

#endif  // INFOPREF_RANDOM_H_
