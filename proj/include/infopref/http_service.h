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

// HTTP+JSON front end for SessionEngine.

#ifndef INFOPREF_HTTP_SERVICE_H_
#define INFOPREF_HTTP_SERVICE_H_

#include <filesystem>
#include <memory>
#include <string>

#include "infopref/errors.h"
#include "infopref/session.h"

namespace infopref {

int HttpStatusFor(ErrorCode code);
std::string ErrorCodeName(ErrorCode code);

class HttpService {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 binds an ephemeral port
    std::filesystem::path static_dir;  // served at / when set
  };

  HttpService(SessionEngine& engine, Options options);
  ~HttpService();

  // Binds the socket and returns the bound port.
  int Bind();
  // Serves until Stop(). Binds first if needed.
  void Run();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace infopref

#endif  // INFOPREF_HTTP_SERVICE_H_
