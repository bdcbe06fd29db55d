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

// Command-line front end. Links only the C interface.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "infopref/infopref.h"

namespace {

using Json = nlohmann::json;

// Owns a string returned by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { infopref_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct EngineDeleter {
  void operator()(infopref_engine* e) const { infopref_engine_destroy(e); }
};
struct ServerDeleter {
  void operator()(infopref_server* s) const { infopref_server_destroy(s); }
};

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

void Check(infopref_status status) {
  if (status != INFOPREF_OK) {
    throw CliError(static_cast<int>(status) + 1, infopref_last_error());
  }
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(2, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw CliError(2, path + ": " + e.what());
  }
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text << '\n';
  if (!out) throw CliError(2, "cannot write " + path);
}

// Applies "a.b.c=value" overrides. Values parse as JSON when possible and
// fall back to plain strings.
void ApplyOverrides(Json& config, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CliError(2, "override '" + s + "' is not key=value");
    }
    const std::string raw = s.substr(eq + 1);
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    Json::json_pointer ptr;
    std::stringstream keys(s.substr(0, eq));
    for (std::string k; std::getline(keys, k, '.');) ptr /= k;
    config[ptr] = value;
  }
}

struct ConfigArgs {
  std::string file;
  std::vector<std::string> sets;

  void Attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", file, "JSON config file");
    cmd->add_option("--set", sets, "override key=value (dotted keys allowed)");
  }
  Json Load() const {
    Json config = file.empty() ? Json::object() : ReadJsonFile(file);
    ApplyOverrides(config, sets);
    return config;
  }
};

void AddExperimentFlags(CLI::App* cmd, std::vector<std::string>& sets) {
  // Short spellings for the most common experiment overrides.
  for (const char* key : {"objective", "query_type", "num_users", "num_queries",
                          "pool_size", "pool_seed", "rng_seed", "threads"}) {
    std::string flag = std::string("--") + key;
    for (char& c : flag) c = c == '_' ? '-' : c;
    cmd->add_option_function<std::string>(
        flag, [&sets, key](const std::string& v) { sets.push_back(std::string(key) + "=" + v); },
        std::string("sets ") + key);
  }
}

std::unique_ptr<infopref_engine, EngineDeleter> OpenEngine(const std::string& data_dir,
                                                          int threads) {
  Json options = {{"threads", threads}};
  if (!data_dir.empty()) options["data_dir"] = data_dir;
  infopref_engine* e = nullptr;
  Check(infopref_engine_create(options.dump().c_str(), &e));
  return std::unique_ptr<infopref_engine, EngineDeleter>(e);
}

int Serve(const std::string& data_dir, const std::string& host, int port,
          const std::string& static_dir, int threads) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto engine = OpenEngine(data_dir, threads);
  Json options = {{"host", host}, {"port", port}};
  if (!static_dir.empty()) options["static_dir"] = static_dir;
  infopref_server* raw = nullptr;
  Check(infopref_server_create(engine.get(), options.dump().c_str(), &raw));
  std::unique_ptr<infopref_server, ServerDeleter> server(raw);
  int bound = 0;
  Check(infopref_server_bind(server.get(), &bound));
  std::cerr << "listening on " << host << ":" << bound << std::endl;

  infopref_status run_status = INFOPREF_OK;
  std::thread worker([&] { run_status = infopref_server_run(server.get()); });
  int sig = 0;
  sigwait(&signals, &sig);
  infopref_server_stop(server.get());
  worker.join();
  Check(run_status);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active preference learning with information-gain queries"};
  app.require_subcommand(1);

  // pool gen
  auto* pool = app.add_subcommand("pool", "query pools");
  pool->require_subcommand(1);
  auto* pool_gen = pool->add_subcommand("gen", "generate a pool and print its manifest");
  ConfigArgs pool_cfg;
  pool_cfg.Attach(pool_gen);
  std::string pool_env, pool_out;
  std::size_t pool_size = 0;
  std::uint64_t pool_seed = 0;
  bool pool_weak = false;
  pool_gen->add_option("--env", pool_env, "environment id (lds, driver)");
  pool_gen->add_option("--size", pool_size, "number of queries");
  pool_gen->add_option("--seed", pool_seed, "pool seed");
  pool_gen->add_flag("--weak", pool_weak, "queries offer an about-equal answer");
  pool_gen->add_option("-o,--out", pool_out, "manifest output path (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run simulated users");
  ConfigArgs sim_cfg;
  sim_cfg.Attach(simulate);
  AddExperimentFlags(simulate, sim_cfg.sets);
  std::string sim_csv = "results.csv", sim_manifest;
  simulate->add_option("--csv", sim_csv, "per-query CSV output")->capture_default_str();
  simulate->add_option("--manifest", sim_manifest, "run manifest output (default stdout)");

  // tune-epsilon
  auto* tune = app.add_subcommand("tune-epsilon", "find epsilon from alignment plateaus");
  ConfigArgs tune_cfg;
  tune_cfg.Attach(tune);
  AddExperimentFlags(tune, tune_cfg.sets);
  std::string tune_out;
  tune->add_option("-o,--out", tune_out, "output path (default stdout)");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP session service");
  std::string host = "127.0.0.1", data_dir, static_dir;
  int port = 8080, threads = 1;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--data-dir", data_dir, "overrides INFOPREF_DATA_DIR");
  serve->add_option("--static-dir", static_dir, "files served at /");
  serve->add_option("--threads", threads, "pool scoring threads")->capture_default_str();

  // session replay
  auto* session = app.add_subcommand("session", "stored sessions");
  session->require_subcommand(1);
  auto* replay = session->add_subcommand("replay", "re-run a session document");
  std::string replay_file, replay_out;
  bool replay_check = false;
  replay->add_option("file", replay_file, "session JSON document")->required();
  replay->add_option("-o,--out", replay_out, "output path (default stdout)");
  replay->add_flag("--check", replay_check,
                   "exit 1 if the pending query or belief differ from the file");
  replay->add_option("--data-dir", data_dir, "overrides INFOPREF_DATA_DIR");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pool_gen->parsed()) {
      Json r = pool_cfg.Load();
      if (!pool_env.empty()) r["environment"] = pool_env;
      if (pool_size) r["size"] = pool_size;
      if (pool_gen->count("--seed")) r["seed"] = pool_seed;
      if (pool_weak) r["weak"] = true;
      LibString out;
      Check(infopref_pool_generate(r.dump().c_str(), &out.p));
      WriteText(pool_out, Json::parse(out.str()).dump(2));
    } else if (simulate->parsed()) {
      LibString out;
      Check(infopref_simulate(sim_cfg.Load().dump().c_str(), sim_csv.c_str(), &out.p));
      WriteText(sim_manifest, Json::parse(out.str()).dump(2));
    } else if (tune->parsed()) {
      LibString out;
      Check(infopref_tune_epsilon(tune_cfg.Load().dump().c_str(), &out.p));
      WriteText(tune_out, Json::parse(out.str()).dump(2));
    } else if (serve->parsed()) {
      return Serve(data_dir, host, port, static_dir, threads);
    } else if (replay->parsed()) {
      const Json doc = ReadJsonFile(replay_file);
      auto engine = OpenEngine(data_dir, 1);
      LibString out;
      Check(infopref_session_replay(engine.get(), doc.dump().c_str(), &out.p));
      const Json replayed = Json::parse(out.str());
      WriteText(replay_out, replayed.dump(2));
      if (replay_check) {
        const bool same = replayed.at("pending") == doc.at("pending") &&
                          replayed.at("belief").dump() == doc.at("belief").dump() &&
                          replayed.at("status") == doc.at("status");
        std::cerr << (same ? "replay matches" : "replay differs") << std::endl;
        return same ? 0 : 1;
      }
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
