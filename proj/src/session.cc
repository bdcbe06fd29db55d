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

#include "infopref/session.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>
#include <utility>
#include <vector>

#include "infopref/errors.h"
#include "infopref/json_codec.h"
#include "infopref/random.h"

namespace infopref {
namespace {

constexpr std::uint64_t kBeliefStream = 0x62656c6900000012ULL;
constexpr std::uint64_t kRandomStream = 0x72616e6400000014ULL;

std::string Hex16(std::uint64_t x) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[i] = kDigits[x & 0xf];
  return s;
}

bool ValidId(const std::string& id) {
  return id.size() == 16 &&
         std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

nlohmann::json OptionalNumber(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

double Quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string SessionStatusName(SessionStatus status) {
  switch (status) {
    case SessionStatus::kAwaitingAnswer:
      return "awaiting_answer";
    case SessionStatus::kStopped:
      return "stopped";
    case SessionStatus::kBudgetExhausted:
      return "budget_exhausted";
  }
  Fail(ErrorCode::kInternal, "bad session status");
}

SessionStatus ParseSessionStatus(const std::string& name) {
  if (name == "awaiting_answer") return SessionStatus::kAwaitingAnswer;
  if (name == "stopped") return SessionStatus::kStopped;
  if (name == "budget_exhausted") return SessionStatus::kBudgetExhausted;
  Fail(ErrorCode::kInvalidArgument, "unknown session status '" + name + "'");
}

QueryResponse ParseAnswer(const std::string& answer) {
  if (answer == "about_equal") return QueryResponse::AboutEqual();
  if (answer.size() == 1 && answer[0] >= 'A' && answer[0] <= 'Z') {
    return QueryResponse::Option(answer[0] - 'A');
  }
  Fail(ErrorCode::kInvalidArgument, "unknown answer '" + answer + "'");
}

std::string AnswerName(const QueryResponse& response) {
  if (response.about_equal()) return "about_equal";
  return std::string(1, static_cast<char>('A' + response.option()));
}

void SessionRequest::Validate() const {
  Require(budget >= 1, "budget must be >= 1");
  Require(pool_size >= 1, "pool_size must be >= 1");
  SamplerConfig s = sampler;
  s.feature_dim = 1;
  s.Validate();
}

nlohmann::json SessionRequest::ToJson() const {
  return {{"environment", environment},
          {"mode", weak ? "weak" : "strict"},
          {"objective", ObjectiveName(objective)},
          {"cost", cost ? cost->ToJson() : nlohmann::json(nullptr)},
          {"budget", budget},
          {"seed", seed},
          {"pool_size", pool_size},
          {"pool_seed", pool_seed},
          {"sampler", sampler.ToJson()}};
}

SessionRequest SessionRequest::FromJson(const nlohmann::json& j) {
  Require(j.is_object(), "session request must be an object");
  SessionRequest r;
  try {
    if (j.contains("environment")) r.environment = j.at("environment");
    if (j.contains("mode")) {
      const auto mode = j.at("mode").get<std::string>();
      Require(mode == "strict" || mode == "weak",
              "mode must be 'strict' or 'weak'");
      r.weak = mode == "weak";
    }
    if (j.contains("objective")) {
      r.objective = ParseObjective(j.at("objective").get<std::string>());
    }
    if (j.contains("cost") && !j.at("cost").is_null()) {
      r.cost = CostSpec::FromJson(j.at("cost"));
    }
    r.budget = j.value("budget", r.budget);
    r.seed = j.value("seed", r.seed);
    r.pool_size = j.value("pool_size", r.pool_size);
    r.pool_seed = j.value("pool_seed", r.pool_seed);
    if (j.contains("sampler")) {
      r.sampler = SamplerConfig::FromJson(j.at("sampler"), r.sampler);
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed session request: ") + e.what());
  }
  r.Validate();
  return r;
}

nlohmann::json BeliefEstimate(const BeliefEnsemble& belief) {
  const auto mean = MeanOmega(belief);
  double n2 = 0.0;
  for (double v : mean) n2 += v * v;
  const double norm = std::sqrt(n2);
  std::vector<double> direction(mean.size(), 0.0);
  if (norm > 0.0) {
    for (std::size_t i = 0; i < mean.size(); ++i) direction[i] = mean[i] / norm;
  }
  nlohmann::json q05 = nlohmann::json::array(), q50 = nlohmann::json::array(),
                 q95 = nlohmann::json::array();
  for (std::size_t i = 0; i < belief.dim(); ++i) {
    std::vector<double> column;
    column.reserve(belief.size());
    for (const auto& s : belief.samples()) column.push_back(s.omega.omega()[i]);
    q05.push_back(Quantile(column, 0.05));
    q50.push_back(Quantile(column, 0.50));
    q95.push_back(Quantile(column, 0.95));
  }
  return {{"mean_direction", direction},
          {"mean_norm", norm},
          {"quantiles", {{"p05", q05}, {"p50", q50}, {"p95", q95}}},
          {"num_samples", belief.size()}};
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& text) {
  static std::atomic<std::uint64_t> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot open " + tmp.string());
    out << text;
    out.flush();
    if (!out) Fail(ErrorCode::kIo, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    Fail(ErrorCode::kIo, "cannot rename into " + path.string());
  }
}

struct SessionEngine::Session {
  std::string id;
  std::int64_t version = 1;
  SessionRequest request;
  std::shared_ptr<const QueryPool> pool;
  InteractionHistory history;
  std::vector<std::size_t> asked;
  std::optional<BeliefEnsemble> belief;
  SessionStatus status = SessionStatus::kAwaitingAnswer;
  std::optional<std::size_t> pending;
  std::optional<double> last_r_star;

  void Resample() {
    SamplerConfig s = request.sampler;
    s.feature_dim = static_cast<int>(pool->dim());
    s.joint = false;
    s.seed = DeriveSeed(request.seed, kBeliefStream, asked.size());
    belief = SampleBelief(s, history);
  }

  void Advance(int threads) {
    pending.reset();
    if (asked.size() >= static_cast<std::size_t>(request.budget) ||
        asked.size() >= pool->size()) {
      status = SessionStatus::kBudgetExhausted;
      return;
    }
    PoolMask mask(pool->size(), 0);
    for (std::size_t i : asked) mask[i] = 1;
    const HumanModelParams& model = request.sampler.model;
    if (request.cost && request.objective == Objective::kInfoGain) {
      const StoppingDecision d =
          StoppingValue(*pool, *belief, model, *request.cost, &mask, threads);
      last_r_star = d.r_star;
      if (d.stop()) {
        status = SessionStatus::kStopped;
        return;
      }
      pending = d.index;
    } else if (request.objective == Objective::kRandom) {
      Rng rng(DeriveSeed(request.seed, kRandomStream, asked.size()));
      pending = SelectRandom(*pool, &mask, rng);
    } else {
      pending = SelectQuery(*pool, *belief, request.objective, model, &mask,
                            threads)
                    .index;
    }
    status = SessionStatus::kAwaitingAnswer;
  }

  void Apply(const QueryResponse& response, int threads) {
    Query query = pool->Materialize(*pending);
    Require(response.ValidFor(query), "answer '" + AnswerName(response) +
                                          "' is not valid for the pending query");
    history.Append(std::move(query), response);
    asked.push_back(*pending);
    ++version;
    Resample();
    Advance(threads);
  }

  nlohmann::json Summary() const {
    nlohmann::json pending_json = nullptr;
    if (pending) {
      nlohmann::json answers = nlohmann::json::array();
      for (int k = 0; k < pool->num_options(); ++k) {
        answers.push_back(AnswerName(QueryResponse::Option(k)));
      }
      if (pool->weak()) answers.push_back("about_equal");
      pending_json = {{"pool_index", *pending}, {"answers", answers}};
    }
    return {{"id", id},
            {"version", version},
            {"status", SessionStatusName(status)},
            {"query_count", asked.size()},
            {"budget", request.budget},
            {"mode", request.weak ? "weak" : "strict"},
            {"objective", ObjectiveName(request.objective)},
            {"last_r_star", OptionalNumber(last_r_star)},
            {"pending", pending_json}};
  }

  nlohmann::json Document() const {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < asked.size(); ++i) {
      entries.push_back({{"pool_index", asked[i]},
                         {"response", AnswerName(history.entries()[i].response)}});
    }
    return {{"id", id},
            {"version", version},
            {"request", request.ToJson()},
            {"pool", pool->manifest().ToJson()},
            {"status", SessionStatusName(status)},
            {"pending", pending ? nlohmann::json(*pending) : nlohmann::json(nullptr)},
            {"last_r_star", OptionalNumber(last_r_star)},
            {"history", entries},
            {"belief", ToJson(*belief)}};
  }

  nlohmann::json Estimate() const {
    nlohmann::json e = BeliefEstimate(*belief);
    e["id"] = id;
    e["query_count"] = asked.size();
    e["last_r_star"] = OptionalNumber(last_r_star);
    e["status"] = SessionStatusName(status);
    return e;
  }
};

struct SessionEngine::Slot {
  std::mutex mu;
  Session session;
};

SessionEngine::SessionEngine(Options options) : options_(std::move(options)) {
  Require(!options_.data_dir.empty(), "session data directory is required");
  std::error_code ec;
  std::filesystem::create_directories(options_.data_dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + options_.data_dir.string());
  std::random_device rd;
  id_salt_ = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

SessionEngine::~SessionEngine() = default;

std::shared_ptr<const QueryPool> SessionEngine::PoolFor(
    const SessionRequest& request) {
  const std::string key = request.environment.dump() + "|" +
                          std::to_string(request.pool_size) + "|" +
                          (request.weak ? "w" : "s") + "|" +
                          std::to_string(request.pool_seed);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = pools_.find(key);
    if (it != pools_.end()) return it->second;
  }
  // Built outside the lock; a racing duplicate is identical and discarded.
  auto env = std::make_shared<const Environment>(
      Environment::Load(request.environment));
  auto pool = std::make_shared<const QueryPool>(
      QueryPool::Generate(env, request.pool_size, 2, request.weak,
                          request.pool_seed, options_.threads));
  std::lock_guard<std::mutex> lock(mu_);
  return pools_.emplace(key, std::move(pool)).first->second;
}

void SessionEngine::Persist(const Session& session) const {
  WriteFileAtomic(options_.data_dir / (session.id + ".json"),
                  session.Document().dump());
}

nlohmann::json SessionEngine::Create(const nlohmann::json& request_json) {
  auto slot = std::make_shared<Slot>();
  Session& s = slot->session;
  s.request = SessionRequest::FromJson(request_json);
  s.pool = PoolFor(s.request);
  {
    std::lock_guard<std::mutex> lock(mu_);
    s.id = Hex16(MixSeed(id_salt_ ^ MixSeed(++id_counter_)));
  }
  s.Resample();
  s.Advance(options_.threads);
  Persist(s);
  std::lock_guard<std::mutex> lock(mu_);
  slots_[s.id] = slot;
  return s.Summary();
}

std::shared_ptr<SessionEngine::Slot> SessionEngine::Find(const std::string& id) {
  if (!ValidId(id)) Fail(ErrorCode::kNotFound, "no session '" + id + "'");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = slots_.find(id);
    if (it != slots_.end()) return it->second;
  }
  const auto path = options_.data_dir / (id + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kNotFound, "no session '" + id + "'");
  std::stringstream text;
  text << in.rdbuf();
  const nlohmann::json doc = ParseJson(text.str());

  auto slot = std::make_shared<Slot>();
  Session& s = slot->session;
  try {
    s.id = doc.at("id").get<std::string>();
    Require(s.id == id, "session file id does not match its name");
    s.version = doc.at("version").get<std::int64_t>();
    s.request = SessionRequest::FromJson(doc.at("request"));
    s.pool = PoolFor(s.request);
    if (PoolManifest::FromJson(doc.at("pool")) != s.pool->manifest()) {
      Fail(ErrorCode::kFailedPrecondition,
           "regenerated pool does not match the stored manifest");
    }
    for (const auto& e : doc.at("history")) {
      const auto index = e.at("pool_index").get<std::size_t>();
      Require(index < s.pool->size(), "stored pool index out of range");
      s.history.Append(s.pool->Materialize(index),
                       ParseAnswer(e.at("response").get<std::string>()));
      s.asked.push_back(index);
    }
    s.status = ParseSessionStatus(doc.at("status").get<std::string>());
    if (!doc.at("pending").is_null()) s.pending = doc.at("pending").get<std::size_t>();
    if (!doc.at("last_r_star").is_null()) {
      s.last_r_star = doc.at("last_r_star").get<double>();
    }
    s.belief = BeliefEnsembleFromJson(doc.at("belief"));
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed session document: ") + e.what());
  }
  Require(s.pending.has_value() == (s.status == SessionStatus::kAwaitingAnswer),
          "session document has an inconsistent pending query");

  std::lock_guard<std::mutex> lock(mu_);
  return slots_.emplace(id, std::move(slot)).first->second;
}

nlohmann::json SessionEngine::Submit(const std::string& id, std::int64_t version,
                                     const QueryResponse& response) {
  auto slot = Find(id);
  std::lock_guard<std::mutex> lock(slot->mu);
  const Session& current = slot->session;
  if (version != current.version) {
    Fail(ErrorCode::kConflict, "stale version " + std::to_string(version) +
                                   ", session is at " +
                                   std::to_string(current.version));
  }
  if (current.status != SessionStatus::kAwaitingAnswer) {
    Fail(ErrorCode::kConflict,
         "session is " + SessionStatusName(current.status));
  }
  Session next = current;
  next.Apply(response, options_.threads);
  Persist(next);
  slot->session = std::move(next);
  return slot->session.Summary();
}

nlohmann::json SessionEngine::Get(const std::string& id) {
  auto slot = Find(id);
  std::lock_guard<std::mutex> lock(slot->mu);
  const Session& s = slot->session;
  nlohmann::json out = s.Summary();
  nlohmann::json history = nlohmann::json::array();
  for (std::size_t i = 0; i < s.asked.size(); ++i) {
    history.push_back({{"pool_index", s.asked[i]},
                       {"response", AnswerName(s.history.entries()[i].response)}});
  }
  out["history"] = history;
  out["environment"] = s.pool->environment()->Config();
  if (s.pending) {
    const Query q = s.pool->Materialize(*s.pending);
    nlohmann::json options = nlohmann::json::array();
    for (int k = 0; k < q.num_options(); ++k) {
      const Trajectory& t = q.option(k);
      options.push_back({{"label", AnswerName(QueryResponse::Option(k))},
                         {"states", ToJson(t.states)},
                         {"actions", ToJson(t.actions)},
                         {"features", ToJson(t.features)}});
    }
    const auto a = q.option(0).features.values();
    const auto b = q.option(1).features.values();
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    out["pending"]["options"] = options;
    out["pending"]["feature_diff"] = diff;
  }
  return out;
}

nlohmann::json SessionEngine::Estimate(const std::string& id) {
  auto slot = Find(id);
  std::lock_guard<std::mutex> lock(slot->mu);
  return slot->session.Estimate();
}

nlohmann::json SessionEngine::Document(const std::string& id) {
  auto slot = Find(id);
  std::lock_guard<std::mutex> lock(slot->mu);
  return slot->session.Document();
}

nlohmann::json SessionEngine::Replay(const nlohmann::json& document) {
  Session s;
  try {
    s.id = document.at("id").get<std::string>();
    s.request = SessionRequest::FromJson(document.at("request"));
    s.pool = PoolFor(s.request);
    if (document.contains("pool") &&
        PoolManifest::FromJson(document.at("pool")) != s.pool->manifest()) {
      Fail(ErrorCode::kFailedPrecondition,
           "regenerated pool does not match the stored manifest");
    }
    s.Resample();
    s.Advance(options_.threads);
    for (const auto& e : document.at("history")) {
      const auto index = e.at("pool_index").get<std::size_t>();
      if (!s.pending || *s.pending != index) {
        Fail(ErrorCode::kFailedPrecondition,
             "replay diverged at query " + std::to_string(s.asked.size() + 1));
      }
      s.Apply(ParseAnswer(e.at("response").get<std::string>()), options_.threads);
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kInvalidArgument,
         std::string("malformed session document: ") + e.what());
  }
  nlohmann::json out = s.Document();
  out["estimate"] = s.Estimate();
  return out;
}

}  // namespace infopref
