/*
 * Copyright 2026 The StopLens Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "stoplens/bundle.hpp"

namespace httplib {
class Server;
}

namespace stoplens::service {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

using Query = std::map<std::string, std::string>;

/// Read-only JSON API over an immutable bundle. Every handler is a pure
/// function of the current bundle and its arguments.
class Service {
 public:
  Service() = default;
  explicit Service(std::shared_ptr<const ModelBundle> bundle);

  /// Atomically replaces the served bundle.
  void swap(std::shared_ptr<const ModelBundle> bundle);
  std::shared_ptr<const ModelBundle> bundle() const;

  Response topics() const;
  Response stopwords(const Query& query) const;
  Response matrix() const;
  Response trace(const std::string& word) const;
  Response word(const std::string& word) const;
  Response seed_lists() const;
  Response word_pt(const Query& query) const;

  /// Dispatches a GET by path.
  Response handle(const std::string& path, const Query& query) const;

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const ModelBundle> bundle_;
};

Response error_response(int status, const std::string& code, const std::string& message);

/// Registers the API routes (plus CORS headers) on an httplib server.
void install_routes(httplib::Server& server, const Service& service);

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> static_dir;
};

/// Blocks until the server stops.
void serve(const Service& service, const ServeOptions& options);

}  // namespace stoplens::service
