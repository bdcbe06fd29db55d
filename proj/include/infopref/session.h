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

// Interactive learning sessions answered by a person, persisted as one JSON
// document per session.

#ifndef INFOPREF_SESSION_H_
#define INFOPREF_SESSION_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "infopref/belief.h"
#include "infopref/query_selection.h"

namespace infopref {

enum class SessionStatus { kAwaitingAnswer, kStopped, kBudgetExhausted };

std::string SessionStatusName(SessionStatus status);
SessionStatus ParseSessionStatus(const std::string& name);

struct SessionRequest {
  nlohmann::json environment = "lds";
  bool weak = false;  // "mode": "strict" | "weak"
  Objective objective = Objective::kInfoGain;
  std::optional<CostSpec> cost;
  int budget = 25;
  std::uint64_t seed = 0;
  std::size_t pool_size = 5000;
  std::uint64_t pool_seed = 1;
  SamplerConfig sampler;

  void Validate() const;
  nlohmann::json ToJson() const;
  static SessionRequest FromJson(const nlohmann::json& j);
};

// Parses "A", "B", ... or "about_equal".
QueryResponse ParseAnswer(const std::string& answer);
std::string AnswerName(const QueryResponse& response);

class SessionEngine {
 public:
  struct Options {
    std::filesystem::path data_dir;
    int threads = 1;  // pool scoring threads per call
  };

  explicit SessionEngine(Options options);
  ~SessionEngine();
  SessionEngine(const SessionEngine&) = delete;
  SessionEngine& operator=(const SessionEngine&) = delete;

  // Each returns the session's state summary.
  nlohmann::json Create(const nlohmann::json& request);
  nlohmann::json Submit(const std::string& id, std::int64_t version,
                        const QueryResponse& response);
  // Summary plus render data for the pending query.
  nlohmann::json Get(const std::string& id);
  nlohmann::json Estimate(const std::string& id);
  // The persisted document.
  nlohmann::json Document(const std::string& id);

  // Re-runs a persisted document from its request and recorded answers,
  // without touching the data directory. Returns the replayed document.
  nlohmann::json Replay(const nlohmann::json& document);

  const std::filesystem::path& data_dir() const { return options_.data_dir; }

 private:
  struct Session;
  struct Slot;

  std::shared_ptr<Slot> Find(const std::string& id);
  std::shared_ptr<const QueryPool> PoolFor(const SessionRequest& request);
  void Persist(const Session& session) const;

  Options options_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
  std::map<std::string, std::shared_ptr<const QueryPool>> pools_;
  std::uint64_t id_counter_ = 0;
  std::uint64_t id_salt_;
};

// Normalized mean direction, per-coordinate 5/50/95% quantiles and the raw
// mean norm of a belief.
nlohmann::json BeliefEstimate(const BeliefEnsemble& belief);

// Writes `text` to `path` through a sibling temp file and rename.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& text);

}  // namespace infopref

#endif  // INFOPREF_SESSION_H_
