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

// Canonical JSON encodings of the domain types. Vectors are arrays,
// matrices are arrays of rows. Objects use nlohmann's sorted-key maps, so
// dump() of an encoded value is canonical.

#ifndef INFOPREF_JSON_CODEC_H_
#define INFOPREF_JSON_CODEC_H_

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "infopref/types.h"

namespace infopref {

using Json = nlohmann::json;

// 64-bit FNV-1a as 16 hex digits.
std::string ContentHash(std::string_view bytes);

Json ToJson(const Matrix& m);
Json ToJson(const FeatureVector& f);
Json ToJson(const RewardParams& omega);
Json ToJson(const HumanModelParams& nu);
Json ToJson(const Trajectory& t);
Json ToJson(const Query& q);
Json ToJson(const QueryResponse& r);
Json ToJson(const BeliefEnsemble& belief);

Matrix MatrixFromJson(const Json& j);
FeatureVector FeatureVectorFromJson(const Json& j);
RewardParams RewardParamsFromJson(const Json& j);
HumanModelParams HumanModelParamsFromJson(const Json& j);
Trajectory TrajectoryFromJson(const Json& j);
Query QueryFromJson(const Json& j);
QueryResponse QueryResponseFromJson(const Json& j);
BeliefEnsemble BeliefEnsembleFromJson(const Json& j);

// Parses text, mapping parse failures to kInvalidArgument.
Json ParseJson(std::string_view text);

}  // namespace infopref

#endif  // INFOPREF_JSON_CODEC_H_
