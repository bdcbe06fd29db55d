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

/* C interface to the preference-learning engine. Strings returned through
 * `char** out` parameters are JSON owned by the caller and released with
 * infopref_string_free. On failure a status other than INFOPREF_OK is
 * returned, `*out` is left NULL and infopref_last_error describes the cause. */

#ifndef INFOPREF_INFOPREF_H_
#define INFOPREF_INFOPREF_H_

#include <stdint.h>

#if defined(_WIN32)
#define INFOPREF_API __declspec(dllexport)
#else
#define INFOPREF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum infopref_status {
  INFOPREF_OK = 0,
  INFOPREF_INVALID_ARGUMENT = 1,
  INFOPREF_NOT_FOUND = 2,
  INFOPREF_CONFLICT = 3,
  INFOPREF_FAILED_PRECONDITION = 4,
  INFOPREF_IO = 5,
  INFOPREF_INTERNAL = 6
} infopref_status;

typedef struct infopref_engine infopref_engine;
typedef struct infopref_server infopref_server;

INFOPREF_API const char* infopref_version(void);
/* Message of the last failure on the calling thread; never NULL. */
INFOPREF_API const char* infopref_last_error(void);
INFOPREF_API void infopref_string_free(char* s);

/* options: {"data_dir": path, "threads": n}. Without data_dir the
 * INFOPREF_DATA_DIR environment variable is used, then "./infopref-data". */
INFOPREF_API infopref_status infopref_engine_create(const char* options_json,
                                                    infopref_engine** out);
INFOPREF_API void infopref_engine_destroy(infopref_engine* engine);

/* request: {environment, mode, objective, cost, budget, seed, pool_size,
 * pool_seed, sampler}; every key is optional. */
INFOPREF_API infopref_status infopref_session_create(infopref_engine* engine,
                                                     const char* request_json,
                                                     char** out);
INFOPREF_API infopref_status infopref_session_get(infopref_engine* engine,
                                                  const char* id, char** out);
/* answer: "A", "B" or "about_equal". */
INFOPREF_API infopref_status infopref_session_respond(infopref_engine* engine,
                                                      const char* id,
                                                      int64_t version,
                                                      const char* answer,
                                                      char** out);
INFOPREF_API infopref_status infopref_session_estimate(infopref_engine* engine,
                                                       const char* id,
                                                       char** out);
/* The persisted session document. */
INFOPREF_API infopref_status infopref_session_document(infopref_engine* engine,
                                                       const char* id,
                                                       char** out);
/* Re-runs a session document; the result carries an extra "estimate" key. */
INFOPREF_API infopref_status infopref_session_replay(infopref_engine* engine,
                                                     const char* document_json,
                                                     char** out);

/* options: {"host", "port", "static_dir"}; port 0 picks a free port. */
INFOPREF_API infopref_status infopref_server_create(infopref_engine* engine,
                                                    const char* options_json,
                                                    infopref_server** out);
INFOPREF_API infopref_status infopref_server_bind(infopref_server* server,
                                                  int* port);
/* Blocks until infopref_server_stop is called from another thread. */
INFOPREF_API infopref_status infopref_server_run(infopref_server* server);
INFOPREF_API void infopref_server_stop(infopref_server* server);
INFOPREF_API void infopref_server_destroy(infopref_server* server);

/* request: {environment, size, weak, seed, threads}; returns the manifest. */
INFOPREF_API infopref_status infopref_pool_generate(const char* request_json,
                                                    char** out);
/* Runs an experiment, writes per-query rows to csv_path and returns the run
 * manifest. */
INFOPREF_API infopref_status infopref_simulate(const char* config_json,
                                               const char* csv_path,
                                               char** out);
/* Returns {"epsilon", "per_user", "plateau", "excluded"}. */
INFOPREF_API infopref_status infopref_tune_epsilon(const char* config_json,
                                                   char** out);

#ifdef __cplusplus
}
#endif

#endif /* INFOPREF_INFOPREF_H_ */
