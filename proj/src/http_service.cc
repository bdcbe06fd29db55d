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

#include "infopref/http_service.h"

#include <utility>

#include "httplib.h"
#include "infopref/json_codec.h"

namespace infopref {
namespace {

void SendJson(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, ErrorCode code, const std::string& msg) {
  SendJson(res, HttpStatusFor(code),
           {{"error", {{"code", ErrorCodeName(code)}, {"message", msg}}}});
}

template <typename Fn>
httplib::Server::Handler Guard(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      SendError(res, e.code(), e.what());
    } catch (const std::exception& e) {
      SendError(res, ErrorCode::kInternal, e.what());
    }
  };
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kFailedPrecondition:
      return 422;
    case ErrorCode::kIo:
    case ErrorCode::kInternal:
      return 500;
  }
  return 500;
}

std::string ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kNotFound:
      return "not_found";
    case ErrorCode::kConflict:
      return "conflict";
    case ErrorCode::kFailedPrecondition:
      return "failed_precondition";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kInternal:
      return "internal";
  }
  return "internal";
}

struct HttpService::Impl {
  Impl(SessionEngine& e, Options o) : engine(e), options(std::move(o)) {}

  SessionEngine& engine;
  Options options;
  httplib::Server server;
  int port = -1;
};

HttpService::HttpService(SessionEngine& engine, Options options)
    : impl_(std::make_unique<Impl>(engine, std::move(options))) {
  auto& srv = impl_->server;
  SessionEngine& eng = impl_->engine;

  srv.Get("/healthz", Guard([](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, {{"status", "ok"}});
  }));
  srv.Post("/sessions", Guard([&eng](const httplib::Request& req,
                                     httplib::Response& res) {
    const Json body = req.body.empty() ? Json::object() : ParseJson(req.body);
    SendJson(res, 201, eng.Create(body));
  }));
  srv.Get(R"(/sessions/([^/]+))",
          Guard([&eng](const httplib::Request& req, httplib::Response& res) {
            SendJson(res, 200, eng.Get(req.matches[1]));
          }));
  srv.Get(R"(/sessions/([^/]+)/estimate)",
          Guard([&eng](const httplib::Request& req, httplib::Response& res) {
            SendJson(res, 200, eng.Estimate(req.matches[1]));
          }));
  srv.Post(R"(/sessions/([^/]+)/response)",
           Guard([&eng](const httplib::Request& req, httplib::Response& res) {
             const Json body = ParseJson(req.body);
             Require(body.is_object() && body.contains("version") &&
                         body.at("version").is_number_integer() &&
                         body.contains("response") &&
                         body.at("response").is_string(),
                     "body needs an integer 'version' and a string 'response'");
             SendJson(res, 200,
                      eng.Submit(req.matches[1], body.at("version").get<std::int64_t>(),
                                 ParseAnswer(body.at("response").get<std::string>())));
           }));
  if (!impl_->options.static_dir.empty()) {
    srv.set_mount_point("/", impl_->options.static_dir.string());
  }
}

HttpService::~HttpService() { Stop(); }

int HttpService::Bind() {
  if (impl_->port >= 0) return impl_->port;
  const auto& o = impl_->options;
  impl_->port = o.port == 0 ? impl_->server.bind_to_any_port(o.host)
                            : (impl_->server.bind_to_port(o.host, o.port) ? o.port : -1);
  if (impl_->port < 0) {
    Fail(ErrorCode::kIo,
         "cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->port;
}

void HttpService::Run() {
  Bind();
  impl_->server.listen_after_bind();
}

void HttpService::Stop() { impl_->server.stop(); }

}  // namespace infopref
