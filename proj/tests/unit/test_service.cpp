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


#include <atomic>
#include <map>
#include <memory>
#include <thread>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "stoplens/bundle.hpp"
#include "stoplens/service.hpp"
#include "stoplens/store.hpp"
#include "support.hpp"

// Last: it must follow the Eigen headers pulled in above.
#include "httplib.h"

using namespace stoplens;
using nlohmann::json;

namespace {

std::shared_ptr<const ModelBundle> small_bundle() {
  static const auto b = std::make_shared<const ModelBundle>(ModelBundle::load(testing::small_run().cfg.out_dir));
  return b;
}

json body(const service::Response& r) { return json::parse(r.body); }

}  // namespace

TEST_CASE("topic summaries cover every topic inside the unit square") {
  const service::Service svc(small_bundle());
  const auto r = svc.topics();
  REQUIRE(r.status == 200);
  const auto j = body(r);
  CHECK(j["n_topics"] == 5);
  REQUIRE(j["topics"].size() == 5);
  std::size_t docs = 0;
  for (const auto& t : j["topics"]) {
    CHECK(t["x"].get<double>() >= 0.0);
    CHECK(t["x"].get<double>() <= 1.0);
    CHECK(t["y"].get<double>() >= 0.0);
    CHECK(t["y"].get<double>() <= 1.0);
    CHECK(t["top_words"].size() == 20);
    docs += t["size"].get<std::size_t>();
  }
  CHECK(docs == small_bundle()->corpus.n_docs());
}

TEST_CASE("stopword queries validate their parameters") {
  const service::Service svc(small_bundle());
  CHECK(body(svc.stopwords({{"threshold", "0"}}))["extracted"].empty());
  for (const char* bad : {"1.1", "-0.1", "abc", "", "0.5x", "nan"}) {
    const auto r = svc.stopwords({{"threshold", bad}});
    CHECK(r.status == 400);
    CHECK(body(r)["code"] == "invalid_threshold");
  }
  const auto r = svc.stopwords({{"source", "elsewhere"}});
  CHECK(r.status == 400);
  CHECK(body(r)["code"] == "invalid_source");
  CHECK(svc.stopwords({{"threshold", "0.6"}, {"source", "approx-2d"}}).status == 200);
  CHECK(svc.stopwords({{"threshold", "1"}}).status == 200);
}

TEST_CASE("the default stopword query equals the stored report") {
  const service::Service svc(small_bundle());
  const auto from_cli = testing::read_file(testing::small_run().cfg.out_dir / "report.json");
  CHECK(svc.stopwords({{"threshold", "0.6"}}).body == from_cli);
  CHECK(svc.stopwords({}).body == from_cli);
}

TEST_CASE("matrix and trace endpoints") {
  const service::Service svc(small_bundle());
  const auto m = body(svc.matrix());
  CHECK(m["cols"] == 5);
  CHECK(m["rows"] == 50);
  CHECK(m["values"].size() == 5 * 50);
  const auto& w = small_bundle()->gpc.stopword_seeds.front();
  const auto t = svc.handle("/api/matrix/trace/" + w, {});
  REQUIRE(t.status == 200);
  CHECK(body(t)["aggregate_pt"].get<double>() < 0.5);
  const auto missing = svc.handle("/api/matrix/trace/qqqnotaword", {});
  CHECK(missing.status == 404);
  CHECK(body(missing)["code"] == "unknown_word");
}

TEST_CASE("word detail is complementary and points at the planted topic") {
  const service::Service svc(small_bundle());
  const auto& truth = testing::small_run().truth;
  const auto& b = *small_bundle();
  for (const auto& w : truth.planted_topic_words) {
    const auto r = svc.handle("/api/words/" + w, {});
    REQUIRE(r.status == 200);
    const auto j = body(r);
    CHECK(j["p_t"].get<double>() + j["p_s"].get<double>() == doctest::Approx(1.0).epsilon(1e-15));
    // The planted topic is where the word is most frequent; map it to the LDA topic the
    // planted documents are dominant in.
    std::map<int, int> votes;
    for (std::size_t d = 0; d < truth.doc_topic.size(); ++d)
      if (truth.doc_topic[d] == truth.topic_of_word(w)) ++votes[b.lda.dominant_topic[d]];
    int expected = -1, most = 0;
    for (auto [t, n] : votes)
      if (n > most) most = n, expected = t;
    const auto raw = j["swdf"]["raw"].get<std::vector<double>>();
    CHECK(std::max_element(raw.begin(), raw.end()) - raw.begin() == expected);
    CHECK(j["frequent_topics"][0]["topic"] == expected);
  }
  CHECK(svc.handle("/api/words/qqqnotaword", {}).status == 404);
}

TEST_CASE("seed lists and word probability pairs") {
  const service::Service svc(small_bundle());
  const auto j = body(svc.seed_lists());
  CHECK(j["bundled_stopwords"].size() == 49);
  CHECK(j["training_stopwords"].size() == small_bundle()->gpc.stopword_seeds.size());
  const auto pairs = body(svc.handle("/api/word-pt", {{"words", "the,qqqnotaword"}}))["pairs"];
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0]["scored"] == true);
  CHECK(pairs[1]["scored"] == false);
  CHECK(pairs[1]["p_t"].is_null());
  CHECK(svc.handle("/api/nothing", {}).status == 404);
}

TEST_CASE("without a bundle every endpoint is unavailable") {
  const service::Service svc;
  for (const char* path : {"/api/topics", "/api/stopwords", "/api/matrix", "/api/seed-lists", "/api/word-pt",
                           "/api/matrix/trace/the", "/api/words/the"})
    CHECK(svc.handle(path, {}).status == 503);
}

TEST_CASE("concurrent HTTP reads match serial answers") {
  service::Service svc(small_bundle());
  httplib::Server server;
  service::install_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::vector<std::string> paths = {"/api/topics", "/api/stopwords?threshold=0.6", "/api/stopwords?threshold=0.3&source=approx-2d",
                                          "/api/matrix", "/api/matrix/trace/the", "/api/words/the", "/api/seed-lists",
                                          "/api/stopwords?threshold=2", "/api/words/qqqnotaword"};
  std::map<std::string, std::pair<int, std::string>> serial;
  {
    httplib::Client client("127.0.0.1", port);
    for (const auto& p : paths) {
      const auto res = client.Get(p);
      REQUIRE(res);
      serial[p] = {res->status, res->body};
    }
  }
  CHECK(serial["/api/stopwords?threshold=0.6"].second == testing::read_file(testing::small_run().cfg.out_dir / "report.json"));
  CHECK(serial["/api/stopwords?threshold=2"].first == 400);
  CHECK(serial["/api/words/qqqnotaword"].first == 404);

  std::atomic<int> mismatches{0};
  std::vector<std::thread> clients;
  for (int c = 0; c < 6; ++c) {
    clients.emplace_back([&, c] {
      httplib::Client client("127.0.0.1", port);
      for (int i = 0; i < 30; ++i) {
        const auto& p = paths[static_cast<std::size_t>((i + c) % static_cast<int>(paths.size()))];
        const auto res = client.Get(p);
        if (!res || res->status != serial[p].first || res->body != serial[p].second) ++mismatches;
      }
    });
  }
  // Swapping in the same bundle mid-flight must not disturb readers.
  for (int i = 0; i < 20; ++i) svc.swap(small_bundle());
  for (auto& t : clients) t.join();
  server.stop();
  listener.join();
  CHECK(mismatches == 0);
}
