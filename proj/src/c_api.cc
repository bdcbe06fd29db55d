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

#include "infopref/infopref.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "infopref/errors.h"
#include "infopref/http_service.h"
#include "infopref/json_codec.h"
#include "infopref/query_selection.h"
#include "infopref/session.h"
#include "infopref/simulation.h"

struct infopref_engine {
  std::unique_ptr<infopref::SessionEngine> engine;
};

struct infopref_server {
  std::unique_ptr<infopref::HttpService> service;
};

namespace {

using infopref::ErrorCode;
using infopref::Json;

thread_local std::string last_error;

infopref_status StatusOf(ErrorCode code) {
  return static_cast<infopref_status>(static_cast<int>(code));
}

// Runs fn, translating exceptions into a status and last_error.
template <typename Fn>
infopref_status Call(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return INFOPREF_OK;
  } catch (const infopref::Error& e) {
    last_error = e.what();
    return StatusOf(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return INFOPREF_INTERNAL;
}

char* Copy(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void Emit(const Json& j, char** out) { *out = Copy(j.dump()); }

Json ParseOptional(const char* text) {
  if (text == nullptr || *text == '\0') return Json::object();
  return infopref::ParseJson(text);
}

void CheckOut(const void* out) {
  infopref::Require(out != nullptr, "output pointer is NULL");
}

void CheckString(const char* s, const char* what) {
  infopref::Require(s != nullptr, std::string(what) + " is NULL");
}

infopref::SessionEngine& EngineOf(infopref_engine* e) {
  infopref::Require(e != nullptr && e->engine != nullptr, "engine is NULL");
  return *e->engine;
}

}  // namespace

extern "C" {

const char* infopref_version(void) { return "0.1.0"; }

const char* infopref_last_error(void) { return last_error.c_str(); }

void infopref_string_free(char* s) { std::free(s); }

infopref_status infopref_engine_create(const char* options_json,
                                       infopref_engine** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    const Json options = ParseOptional(options_json);
    infopref::SessionEngine::Options o;
    if (options.contains("data_dir")) {
      o.data_dir = options.at("data_dir").get<std::string>();
    } else if (const char* env = std::getenv("INFOPREF_DATA_DIR"); env && *env) {
      o.data_dir = env;
    } else {
      o.data_dir = "infopref-data";
    }
    o.threads = options.value("threads", 1);
    auto handle = std::make_unique<infopref_engine>();
    handle->engine = std::make_unique<infopref::SessionEngine>(std::move(o));
    *out = handle.release();
  });
}

void infopref_engine_destroy(infopref_engine* engine) { delete engine; }

infopref_status infopref_session_create(infopref_engine* engine,
                                        const char* request_json, char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    Emit(EngineOf(engine).Create(ParseOptional(request_json)), out);
  });
}

infopref_status infopref_session_get(infopref_engine* engine, const char* id,
                                     char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    CheckString(id, "session id");
    Emit(EngineOf(engine).Get(id), out);
  });
}

infopref_status infopref_session_respond(infopref_engine* engine,
                                         const char* id, int64_t version,
                                         const char* answer, char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    CheckString(id, "session id");
    CheckString(answer, "answer");
    Emit(EngineOf(engine).Submit(id, version, infopref::ParseAnswer(answer)), out);
  });
}

infopref_status infopref_session_estimate(infopref_engine* engine,
                                          const char* id, char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    CheckString(id, "session id");
    Emit(EngineOf(engine).Estimate(id), out);
  });
}

infopref_status infopref_session_document(infopref_engine* engine,
                                          const char* id, char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    CheckString(id, "session id");
    Emit(EngineOf(engine).Document(id), out);
  });
}

infopref_status infopref_session_replay(infopref_engine* engine,
                                        const char* document_json, char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    CheckString(document_json, "document");
    Emit(EngineOf(engine).Replay(infopref::ParseJson(document_json)), out);
  });
}

infopref_status infopref_server_create(infopref_engine* engine,
                                       const char* options_json,
                                       infopref_server** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    const Json options = ParseOptional(options_json);
    infopref::HttpService::Options o;
    o.host = options.value("host", o.host);
    o.port = options.value("port", o.port);
    o.static_dir = options.value("static_dir", std::string());
    infopref::Require(o.port >= 0 && o.port <= 65535, "port out of range");
    auto handle = std::make_unique<infopref_server>();
    handle->service =
        std::make_unique<infopref::HttpService>(EngineOf(engine), std::move(o));
    *out = handle.release();
  });
}

infopref_status infopref_server_bind(infopref_server* server, int* port) {
  return Call([&] {
    infopref::Require(server != nullptr, "server is NULL");
    const int bound = server->service->Bind();
    if (port != nullptr) *port = bound;
  });
}

infopref_status infopref_server_run(infopref_server* server) {
  return Call([&] {
    infopref::Require(server != nullptr, "server is NULL");
    server->service->Run();
  });
}

void infopref_server_stop(infopref_server* server) {
  if (server != nullptr) server->service->Stop();
}

void infopref_server_destroy(infopref_server* server) { delete server; }

infopref_status infopref_pool_generate(const char* request_json, char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    const Json r = ParseOptional(request_json);
    auto env = std::make_shared<const infopref::Environment>(
        infopref::Environment::Load(r.value("environment", Json("lds"))));
    const auto size = r.value("size", std::size_t{20000});
    infopref::Require(size >= 1, "pool size must be >= 1");
    const auto pool = infopref::QueryPool::Generate(
        env, size, 2, r.value("weak", false), r.value("seed", std::uint64_t{1}),
        r.value("threads", 0));
    Json manifest = pool.manifest().ToJson();
    manifest["environment"] = env->Config();
    Emit(manifest, out);
  });
}

infopref_status infopref_simulate(const char* config_json, const char* csv_path,
                                  char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    const auto config =
        infopref::ExperimentConfig::FromJson(ParseOptional(config_json));
    const auto result = infopref::RunExperiment(config);
    if (csv_path != nullptr && *csv_path != '\0') {
      std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
      if (!csv) infopref::Fail(ErrorCode::kIo, std::string("cannot open ") + csv_path);
      infopref::WriteCsv(result, csv);
      if (!csv) infopref::Fail(ErrorCode::kIo, std::string("cannot write ") + csv_path);
    }
    Emit(infopref::Manifest(result), out);
  });
}

infopref_status infopref_tune_epsilon(const char* config_json, char** out) {
  if (out != nullptr) *out = nullptr;
  return Call([&] {
    CheckOut(out);
    const auto config =
        infopref::ExperimentConfig::FromJson(ParseOptional(config_json));
    const auto t = infopref::TuneEpsilon(config);
    Json per_user = Json::array();
    for (double v : t.per_user) {
      per_user.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    }
    Emit({{"epsilon", t.epsilon},
          {"per_user", per_user},
          {"plateau", t.plateau},
          {"excluded", t.excluded}},
         out);
  });
}

}  // extern "C"
