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

#include "infopref/json_codec.h"

#include <cstdint>
#include <cstdio>
#include <utility>
#include <vector>

#include "infopref/errors.h"

namespace infopref {
namespace {

// Runs a decoder, turning nlohmann type/key errors into kInvalidArgument.
template <typename F>
auto Decode(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

std::string ContentHash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json ToJson(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Json ToJson(const FeatureVector& f) {
  return std::vector<double>(f.values().begin(), f.values().end());
}

Json ToJson(const RewardParams& omega) {
  return std::vector<double>(omega.omega().begin(), omega.omega().end());
}

Json ToJson(const HumanModelParams& nu) {
  return {{"delta", nu.delta}, {"beta", nu.beta}};
}

Json ToJson(const Trajectory& t) {
  return {{"env_id", t.env_id},
          {"actions", ToJson(t.actions)},
          {"states", ToJson(t.states)},
          {"features", ToJson(t.features)}};
}

Json ToJson(const Query& q) {
  Json options = Json::array();
  for (const auto& t : q.options()) options.push_back(ToJson(t));
  return {{"options", options}, {"weak", q.weak()}};
}

Json ToJson(const QueryResponse& r) {
  if (r.about_equal()) return {{"kind", "about_equal"}};
  return {{"kind", "option"}, {"index", r.option()}};
}

Json ToJson(const BeliefEnsemble& belief) {
  Json samples = Json::array();
  for (const auto& s : belief.samples()) {
    Json entry = {{"omega", ToJson(s.omega)}};
    if (s.nu) entry["nu"] = ToJson(*s.nu);
    samples.push_back(std::move(entry));
  }
  return {{"samples", samples}, {"M", belief.size()}};
}

Matrix MatrixFromJson(const Json& j) {
  return Decode("matrix", [&] {
    Matrix m;
    m.rows = j.size();
    m.cols = m.rows > 0 ? j.at(0).size() : 0;
    m.data.reserve(m.rows * m.cols);
    for (const auto& row : j) {
      Require(row.size() == m.cols, "ragged matrix");
      for (const auto& v : row) m.data.push_back(v.get<double>());
    }
    return m;
  });
}

FeatureVector FeatureVectorFromJson(const Json& j) {
  return Decode("feature vector",
                [&] { return FeatureVector(j.get<std::vector<double>>()); });
}

RewardParams RewardParamsFromJson(const Json& j) {
  return Decode("reward params",
                [&] { return RewardParams(j.get<std::vector<double>>()); });
}

HumanModelParams HumanModelParamsFromJson(const Json& j) {
  return Decode("human model params", [&] {
    HumanModelParams nu{j.at("delta").get<double>(), j.at("beta").get<double>()};
    nu.Validate();
    return nu;
  });
}

Trajectory TrajectoryFromJson(const Json& j) {
  return Decode("trajectory", [&] {
    Trajectory t;
    t.env_id = j.at("env_id").get<std::string>();
    t.actions = MatrixFromJson(j.at("actions"));
    t.states = MatrixFromJson(j.at("states"));
    t.features = FeatureVectorFromJson(j.at("features"));
    return t;
  });
}

Query QueryFromJson(const Json& j) {
  return Decode("query", [&] {
    std::vector<Trajectory> options;
    for (const auto& o : j.at("options")) options.push_back(TrajectoryFromJson(o));
    return Query(std::move(options), j.at("weak").get<bool>());
  });
}

QueryResponse QueryResponseFromJson(const Json& j) {
  return Decode("response", [&] {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "about_equal") return QueryResponse::AboutEqual();
    Require(kind == "option", "unknown response kind '" + kind + "'");
    return QueryResponse::Option(j.at("index").get<int>());
  });
}

BeliefEnsemble BeliefEnsembleFromJson(const Json& j) {
  return Decode("belief ensemble", [&] {
    std::vector<BeliefSample> samples;
    for (const auto& s : j.at("samples")) {
      BeliefSample sample{RewardParamsFromJson(s.at("omega")), std::nullopt};
      if (s.contains("nu")) sample.nu = HumanModelParamsFromJson(s.at("nu"));
      samples.push_back(std::move(sample));
    }
    return BeliefEnsemble(std::move(samples));
  });
}

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kInvalidArgument, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace infopref
