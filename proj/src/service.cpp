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

#include "stoplens/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "stoplens/log.hpp"
#include "stoplens/seeds.hpp"

namespace stoplens::service {

using nlohmann::json;

namespace {

Response ok(const json& j) { return {200, store::canonical(j), "application/json"}; }

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

Response unavailable() { return error_response(503, "bundle_not_loaded", "no model bundle is loaded"); }

}  // namespace

Response error_response(int status, const std::string& code, const std::string& message) {
  return {status, store::canonical(json{{"code", code}, {"message", message}}), "application/json"};
}

Service::Service(std::shared_ptr<const ModelBundle> bundle) : bundle_(std::move(bundle)) {}

void Service::swap(std::shared_ptr<const ModelBundle> bundle) {
  std::lock_guard<std::mutex> lock(mu_);
  bundle_ = std::move(bundle);
}

std::shared_ptr<const ModelBundle> Service::bundle() const {
  std::lock_guard<std::mutex> lock(mu_);
  return bundle_;
}

Response Service::topics() const {
  const auto b = bundle();
  if (!b) return unavailable();
  constexpr std::size_t kTopWords = 20;
  json topics = json::array();
  for (int t = 0; t < b->lda.n_topics(); ++t) {
    json words = json::array();
    for (const auto& w : topic::top_words(b->lda, b->corpus.vocabulary, t, kTopWords)) {
      auto it = b->full_index.find(w);
      words.push_back({{"word", w}, {"p_t", it == b->full_index.end() ? json(nullptr) : json(b->gpc.probabilities[it->second].p_t)}});
    }
    const auto& p = b->layout[static_cast<std::size_t>(t)];
    topics.push_back({{"id", t},
                      {"x", p.x},
                      {"y", p.y},
                      {"size", b->stats.doc_count[static_cast<std::size_t>(t)]},
                      {"top_words", std::move(words)}});
  }
  return ok({{"n_topics", b->lda.n_topics()}, {"topics", std::move(topics)}});
}

Response Service::stopwords(const Query& query) const {
  const auto b = bundle();
  if (!b) return unavailable();
  extraction::ExtractionConfig config;
  if (auto it = query.find("threshold"); it != query.end()) {
    const auto t = parse_real(it->second);
    if (!t || *t < 0.0 || *t > 1.0) {
      return error_response(400, "invalid_threshold", "threshold must be a real number in [0, 1]");
    }
    config.threshold = *t;
  }
  if (auto it = query.find("source"); it != query.end()) {
    if (it->second == "full-gpc") {
      config.source = extraction::Source::kFullGpc;
    } else if (it->second == "approx-2d") {
      config.source = extraction::Source::kApprox2d;
    } else {
      return error_response(400, "invalid_source", "source must be full-gpc or approx-2d");
    }
  }
  return ok(store::encode_report(b->report(config)));
}

Response Service::matrix() const {
  const auto b = bundle();
  if (!b) return unavailable();
  auto j = store::encode_grid(b->matrix.grid);
  j["kernel"] = store::encode_kernel(b->matrix.model.model.kernel);
  j["aggregator"] = gpc2d::aggregator_name(b->matrix.model.aggregator);
  j["dim_scale"] = gpc2d::dim_scale_name(b->matrix.model.dim_scale);
  j["training_words"] = b->matrix.model.training_words;
  return ok(j);
}

Response Service::trace(const std::string& word) const {
  const auto b = bundle();
  if (!b) return unavailable();
  auto it = b->trace_index.find(word);
  if (it == b->trace_index.end()) return error_response(404, "unknown_word", "word '" + word + "' is not scored");
  return ok(store::encode_trace(b->matrix.traces[it->second]));
}

Response Service::word(const std::string& word) const {
  const auto b = bundle();
  if (!b) return unavailable();
  auto it = b->full_index.find(word);
  auto ft = b->features.find(word);
  if (it == b->full_index.end() || ft == b->features.end()) {
    return error_response(404, "unknown_word", "word '" + word + "' is not scored");
  }
  const auto& p = b->gpc.probabilities[it->second];
  const auto& f = ft->second;
  constexpr std::size_t kFrequentTopics = 5;
  json frequent = json::array();
  for (std::size_t h = 0; h < f.dimension_to_topic.size() && frequent.size() < kFrequentTopics; ++h) {
    const int t = f.dimension_to_topic[h];
    const double dfw = f.raw[static_cast<std::size_t>(t)];
    if (dfw <= 0.0) break;
    frequent.push_back({{"topic", t}, {"dfw", dfw}});
  }
  json seed = nullptr;
  const auto& ss = b->gpc.stopword_seeds;
  const auto& ts = b->gpc.topicword_seeds;
  if (std::find(ss.begin(), ss.end(), word) != ss.end()) seed = "stopword";
  if (std::find(ts.begin(), ts.end(), word) != ts.end()) seed = "topicword";
  json approx = nullptr;
  if (auto at = b->approx_index.find(word); at != b->approx_index.end()) approx = b->approx_probabilities[at->second].p_t;
  return ok({{"word", word},
             {"p_t", p.p_t},
             {"p_s", p.p_s},
             {"approx_pt", approx},
             {"seed", seed},
             {"swdf", {{"raw", f.raw}, {"sorted_normalized", f.sorted_normalized}, {"dimension_to_topic", f.dimension_to_topic}}},
             {"frequent_topics", std::move(frequent)}});
}

Response Service::seed_lists() const {
  const auto b = bundle();
  if (!b) return unavailable();
  return ok({{"bundled_stopwords", seeds::default_stopwords()},
             {"training_stopwords", b->gpc.stopword_seeds},
             {"training_topicwords", b->gpc.topicword_seeds},
             {"skipped", b->gpc.skipped}});
}

Response Service::word_pt(const Query& query) const {
  const auto b = bundle();
  if (!b) return unavailable();
  std::vector<std::string> words;
  if (auto it = query.find("words"); it != query.end()) {
    std::stringstream ss(it->second);
    std::string w;
    while (std::getline(ss, w, ',')) {
      if (!w.empty()) words.push_back(w);
    }
  }
  json pairs = json::array();
  for (const auto& e : extraction::word_pt_table(b->gpc.probabilities, words)) {
    pairs.push_back({{"word", e.word}, {"p_t", e.p_t ? json(*e.p_t) : json(nullptr)}, {"scored", e.p_t.has_value()}});
  }
  return ok({{"pairs", std::move(pairs)}});
}

Response Service::handle(const std::string& path, const Query& query) const {
  static const std::string trace_prefix = "/api/matrix/trace/";
  static const std::string word_prefix = "/api/words/";
  if (path == "/api/topics") return topics();
  if (path == "/api/stopwords") return stopwords(query);
  if (path == "/api/matrix") return matrix();
  if (path == "/api/seed-lists") return seed_lists();
  if (path == "/api/word-pt") return word_pt(query);
  if (path.rfind(trace_prefix, 0) == 0) return trace(path.substr(trace_prefix.size()));
  if (path.rfind(word_prefix, 0) == 0) return word(path.substr(word_prefix.size()));
  return error_response(404, "not_found", "no route for " + path);
}

void install_routes(httplib::Server& server, const Service& service) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Get(R"(/api/.*)", [&service](const httplib::Request& req, httplib::Response& res) {
    Query q;
    for (const auto& [k, v] : req.params) q.emplace(k, v);
    const auto r = service.handle(req.path, q);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  });
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

void serve(const Service& service, const ServeOptions& options) {
  httplib::Server server;
  install_routes(server, service);
  if (options.static_dir && !server.set_mount_point("/", *options.static_dir)) {
    throw InputError("static directory not found: " + *options.static_dir);
  }
  log::warn("serving on http://", options.host, ":", options.port);
  if (!server.listen(options.host, options.port)) {
    throw Error("cannot listen on " + options.host + ":" + std::to_string(options.port));
  }
}

}  // namespace stoplens::service
