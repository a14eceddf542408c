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


// End-to-end acceptance checks. Prints one PASS or FAIL line per criterion and exits
// nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "stoplens/bundle.hpp"
#include "stoplens/extraction.hpp"
#include "stoplens/features.hpp"
#include "stoplens/gpc.hpp"
#include "stoplens/gpc2d.hpp"
#include "stoplens/pipeline.hpp"
#include "stoplens/service.hpp"
#include "stoplens/store.hpp"
#include "stoplens/synth.hpp"
#include "support.hpp"

// Last: it must follow the Eigen headers pulled in above.
#include "httplib.h"

using namespace stoplens;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

int cli(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = "'" + testing::cli_path() + "' " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return -1;
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = ::pclose(pipe);
  if (output != nullptr) *output = out;
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// ---------------------------------------------------------------------------
// Shared planted-corpus runs, produced through the command line.

const char* kStages[] = {"ingest", "lda", "gpc", "matrix", "extract"};
const char* kArtifacts[] = {"corpus.slj", "lda.slj", "gpc.slj", "matrix.slj", "report.slj", "report.json", "stopwords.txt"};

struct PlantedRun {
  testing::TempDir a;
  testing::TempDir b;
  synth::PlantedCorpus truth;
  std::map<std::string, double> stage_seconds;  // first run
  std::string failure;
  double separating_threshold = -1.0;
};

std::string planted_args(const fs::path& out) {
  return "--input '" + testing::fixture("planted_2000.jsonl").string() + "' --seed 1 --out '" + out.string() + "'";
}

PlantedRun& planted() {
  static const std::unique_ptr<PlantedRun> run = [] {
    auto r = std::make_unique<PlantedRun>();
    r->truth = synth::generate(synth::planted_default());
    for (const auto* dir : {&r->a, &r->b}) {
      for (const char* stage : kStages) {
        const auto t0 = Clock::now();
        std::string out;
        if (cli(std::string(stage) + " " + planted_args(dir->path()), &out) != 0) {
          r->failure = std::string(stage) + " failed: " + out;
          return r;
        }
        if (dir == &r->a) r->stage_seconds[stage] = seconds_since(t0);
      }
    }
    return r;
  }();
  return *run;
}

template <typename T>
T load(const std::string& name) {
  return store::load_as<T>(planted().a / name);
}

// ---------------------------------------------------------------------------

Outcome gpc_oracle_agreement() {
  const auto t0 = Clock::now();
  const std::vector<std::vector<double>> layouts2 = {{0.0, 1.0}, {0.0, 0.4}, {-1.0, 1.5}};
  const std::vector<std::vector<double>> layouts3 = {{0.0, 0.7, 2.0}, {-1.0, 0.0, 1.0}, {0.0, 0.3, 0.6}};
  const std::vector<std::vector<int>> labels2 = {{0, 1}, {1, 0}};
  const std::vector<std::vector<int>> labels3 = {{0, 1, 1}, {1, 0, 1}, {0, 0, 1}};
  const std::vector<std::pair<double, double>> hypers = {{1.0, 1.0}, {0.5, 0.5}, {2.0, 1.0}, {1.0, 2.0}};

  struct Case {
    std::vector<double> x;
    std::vector<int> y;
    double var, ell;
  };
  std::vector<Case> cases;
  for (std::size_t i = 0; i < layouts2.size(); ++i)
    cases.push_back({layouts2[i], labels2[i % 2], hypers[i % hypers.size()].first, hypers[i % hypers.size()].second});
  for (std::size_t i = 0; i < layouts3.size(); ++i)
    for (std::size_t j = 0; j < labels3.size(); ++j) {
      const auto& h = hypers[(i + j) % hypers.size()];
      cases.push_back({layouts3[i], labels3[j], h.first, h.second});
    }
  for (std::size_t i = 0; i < hypers.size(); ++i) cases.push_back({{0.0, 0.5, 1.0}, {0, 1, 0}, hypers[i].first, hypers[i].second});
  for (std::size_t i = 0; i < hypers.size(); ++i) cases.push_back({{0.2, 1.4}, {0, 1}, hypers[i].first, hypers[i].second});

  double worst = 0.0;
  std::size_t queries = 0;
  for (const auto& c : cases) {
    gpc::TrainingSet ts;
    ts.inputs.resize(static_cast<Eigen::Index>(c.x.size()), 1);
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      ts.inputs(static_cast<Eigen::Index>(i), 0) = c.x[i];
      ts.words.push_back("w" + std::to_string(i));
    }
    ts.labels = c.y;
    auto k = gpc::Kernel::make(gpc::KernelFamily::kRadialBasis);
    k.variance = c.var;
    k.length_scale = c.ell;
    const auto model = gpc::train(ts, k);
    const double lo = *std::min_element(c.x.begin(), c.x.end()) - 1.0;
    const double hi = *std::max_element(c.x.begin(), c.x.end()) + 1.0;
    const oracle::GridPosterior exact_posterior(c.x, c.y, c.var, c.ell, c.x.size() == 3 ? 81 : 201);
    for (int q = 0; q < 4; ++q) {
      const double xq = lo + (hi - lo) * (q + 0.5) / 4.0;
      Eigen::RowVectorXd row(1);
      row << xq;
      const double laplace = gpc::predict_pt(model, row);
      const double exact = exact_posterior.predictive(xq);
      worst = std::max(worst, std::abs(laplace - exact));
      ++queries;
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = cases.size() >= 20 && worst <= 0.05 && elapsed < 10.0;
  o.detail = std::to_string(cases.size()) + " sets, " + std::to_string(queries) + " queries, max |laplace - exact| = " +
             fmt(worst) + ", " + fmt(elapsed, 3) + " s";
  return o;
}

Outcome label_flip_symmetry() {
  const auto g = load<store::GpcArtifact>("gpc.slj");
  auto flipped = g.model.training;
  for (auto& l : flipped.labels) l = 1 - l;
  const auto mirror = gpc::train(flipped, g.model.kernel);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = static_cast<std::size_t>(g.model.training.dimension());
  double worst = 0.0;
  for (int q = 0; q < 100; ++q) {
    std::vector<double> raw(n);
    // Mix flat, spiky and in-between profiles.
    const double power = 0.25 + 8.0 * u(rng);
    for (auto& x : raw) x = std::pow(u(rng), power) + 1e-9;
    const auto v = features::swdf(raw);
    const double a = gpc::predict_pt(g.model, v).p_t;
    const double b = gpc::predict_pt(mirror, v).p_t;
    worst = std::max(worst, std::abs(b - (1.0 - a)));
  }
  return {worst <= 1e-8, "100 queries on the planted model, max deviation " + fmt(worst, 3)};
}

Outcome frequency_properties() {
  const auto c = load<store::CorpusArtifact>("corpus.slj").corpus;
  const auto lda = load<store::LdaArtifact>("lda.slj").model;
  const auto stats = topic::topic_doc_stats(c, lda);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  std::size_t bad = 0, words = 0;
  for (std::size_t w = 0; w < c.vocabulary.size(); ++w) {
    const auto df = features::document_frequency(stats, static_cast<corpus::WordId>(w));
    for (double x : df) bad += (x < 0.0 || x > 1.0) ? 1 : 0;
    const auto v = features::swdf(df);
    double sum = 0.0;
    for (std::size_t h = 0; h < v.dimension(); ++h) {
      sum += v.sorted_normalized[h];
      if (h > 0 && v.sorted_normalized[h] > v.sorted_normalized[h - 1]) ++bad;
    }
    if (std::abs(sum - 1.0) > 1e-12) ++bad;
    std::vector<double> scaled(df);
    const double lambda = scale(rng);
    for (auto& x : scaled) x *= lambda;
    const auto s = features::swdf(scaled);
    for (std::size_t h = 0; h < v.dimension(); ++h)
      if (std::abs(s.sorted_normalized[h] - v.sorted_normalized[h]) > 1e-15) ++bad;
    ++words;
  }

  // The two-topic extreme case built as a real corpus: ten documents of a hundred tokens
  // per topic, the word filling one document in topic 0 and once in each in topic 1.
  constexpr int kNd = 10, kNw = 100;
  std::vector<std::string> texts;
  auto rep = [](const std::string& w, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += w + " ";
    return s;
  };
  for (int d = 0; d < kNd; ++d) texts.push_back(d == 0 ? rep("ww", kNd) + rep("aa", kNw - kNd) : rep("aa", kNw));
  for (int d = 0; d < kNd; ++d) texts.push_back("ww " + rep("bb", kNw - 1));
  const auto ec = testing::corpus_from_texts(texts);
  topic::LdaModel m;
  m.phi = Eigen::MatrixXd::Constant(2, static_cast<Eigen::Index>(ec.vocabulary.size()), 1.0 / 3.0);
  m.theta = Eigen::MatrixXd::Zero(2 * kNd, 2);
  for (int d = 0; d < 2 * kNd; ++d) {
    m.theta(d, d < kNd ? 0 : 1) = 1.0;
    m.dominant_topic.push_back(d < kNd ? 0 : 1);
  }
  const auto tf = features::term_frequency(ec, m, "ww").raw;
  const auto df = features::document_frequency(topic::topic_doc_stats(ec, m), ec.vocabulary, "ww");
  const bool extreme = tf[0] == 1.0 / kNw && tf[1] == 1.0 / kNw && df[0] == 1.0 / kNd && df[1] == 1.0;
  return {bad == 0 && extreme, std::to_string(words) + " planted-corpus words checked, " + std::to_string(bad) +
                                   " violations; extreme case Tfw = [" + fmt(tf[0]) + ", " + fmt(tf[1]) + "], Dfw = [" +
                                   fmt(df[0]) + ", " + fmt(df[1]) + "]"};
}

Outcome planted_extraction() {
  auto& run = planted();
  const auto c = load<store::CorpusArtifact>("corpus.slj").corpus;
  const auto g = load<store::GpcArtifact>("gpc.slj");
  const auto& truth = run.truth;

  // The corpus must be the one described: 30 topics, 2000 documents, ten stopwords in at
  // least 90% of documents and sixty topic words each confined to one planted topic.
  std::set<int> topics(truth.doc_topic.begin(), truth.doc_topic.end());
  bool shape = topics.size() == 30 && c.n_docs() == 2000 && truth.stopwords.size() == 10 &&
               truth.planted_topic_words.size() == 60;
  for (const auto& w : truth.stopwords) {
    const auto id = c.vocabulary.find(w);
    shape = shape && id && c.vocabulary.doc_count(*id) >= 1800;
  }
  std::map<std::string, std::set<int>> seen_in;
  for (std::size_t d = 0; d < c.n_docs(); ++d)
    for (auto w : c.documents[d]) seen_in[c.vocabulary.word(w)].insert(truth.doc_topic[d]);
  for (const auto& w : truth.planted_topic_words) shape = shape && seen_in[w].size() == 1;

  double hi_stop = 0.0, lo_topic = 1.0;
  std::map<std::string, double> pt;
  for (const auto& p : g.probabilities) pt[p.word] = p.p_t;
  for (const auto& w : truth.stopwords) hi_stop = std::max(hi_stop, pt.count(w) ? pt[w] : 1.0);
  for (const auto& w : truth.planted_topic_words) lo_topic = std::min(lo_topic, pt.count(w) ? pt[w] : 0.0);
  const bool separable = hi_stop < lo_topic;
  if (separable) run.separating_threshold = 0.5 * (hi_stop + lo_topic);

  // Confirm through the extraction function itself at the separating threshold.
  std::size_t recalled = 0, false_pos = 0;
  if (separable) {
    extraction::ExtractionConfig cfg;
    cfg.threshold = run.separating_threshold;
    const auto r = extraction::extract(g.probabilities, cfg, g.stopword_seeds);
    std::set<std::string> got;
    for (const auto& w : r.extracted) got.insert(w.word);
    for (const auto& w : truth.stopwords) recalled += got.count(w);
    for (const auto& w : truth.planted_topic_words) false_pos += got.count(w);
  }
  const double pipeline_s = run.stage_seconds["ingest"] + run.stage_seconds["lda"] + run.stage_seconds["gpc"] +
                            run.stage_seconds["extract"];
  Outcome o;
  o.pass = shape && separable && recalled == truth.stopwords.size() && false_pos == 0 && pipeline_s < 300.0;
  o.detail = std::string(shape ? "corpus shape ok" : "corpus shape MISMATCH") + ", stopword max p_t " + fmt(hi_stop) +
             " < topic-word min p_t " + fmt(lo_topic) + ", threshold " + fmt(run.separating_threshold) + ": recall " +
             std::to_string(recalled) + "/10, false positives " + std::to_string(false_pos) + "/60, pipeline " +
             fmt(pipeline_s, 3) + " s";
  return o;
}

Outcome kernel_harness() {
  auto cfg = pipeline::PipelineConfig{};
  cfg.out_dir = planted().a.path();
  std::ostringstream sink;
  const auto rows = pipeline::pilot_kernels(cfg, sink);
  const auto g = load<store::GpcArtifact>("gpc.slj");
  const auto& ts = g.model.training;
  const double majority = static_cast<double>(std::max(ts.count(0), ts.count(1))) / static_cast<double>(ts.size());
  double white = -1.0, min_other = 2.0;
  std::string scores;
  for (const auto& r : rows) {
    scores += std::string(gpc::family_name(r.family)) + "=" + (r.ok ? fmt(r.score) : "error") + " ";
    if (!r.ok) continue;
    if (r.family == gpc::KernelFamily::kWhite) {
      white = r.score;
    } else {
      min_other = std::min(min_other, r.score);
    }
  }
  const bool pass = rows.size() == 6 && white >= 0.0 && white <= min_other && std::abs(white - majority) <= 0.1;
  return {pass, std::to_string(rows.size()) + " rows: " + scores + "majority rate " + fmt(majority)};
}

Outcome approx_2d() {
  const auto m = load<store::MatrixArtifact>("matrix.slj");
  const auto& grid = m.grid;
  const bool shape = grid.n == 30 && grid.df_cells == 50 && grid.df_step == 0.02 && grid.values.size() == 1500;
  const double t = planted().separating_threshold;
  std::size_t recalled = 0;
  if (t > 0) {
    const auto list = gpc2d::extract_l4(m.traces, t);
    std::set<std::string> got;
    for (const auto& w : list) got.insert(w.word);
    for (const auto& w : planted().truth.stopwords) recalled += got.count(w);
  }
  const double recall = static_cast<double>(recalled) / static_cast<double>(planted().truth.stopwords.size());
  return {shape && t > 0 && recall >= 0.8, "grid " + std::to_string(grid.n) + "x" + std::to_string(grid.df_cells) +
                                               " at step " + fmt(grid.df_step) + ", recall " + fmt(recall) +
                                               " at threshold " + fmt(t) + ", matrix stage " +
                                               fmt(planted().stage_seconds["matrix"], 3) + " s"};
}

Outcome determinism() {
  const auto& run = planted();
  std::size_t same = 0;
  std::string diff;
  for (const char* f : kArtifacts) {
    const bool eq = testing::read_file(run.a / f) == testing::read_file(run.b / f);
    bool hash_eq = true;
    if (std::string(f).ends_with(".slj")) hash_eq = store::peek(run.a / f).content_hash == store::peek(run.b / f).content_hash;
    if (eq && hash_eq) {
      ++same;
    } else {
      diff += std::string(" ") + f;
    }
  }
  const std::size_t total = std::size(kArtifacts);
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " files byte-identical across two CLI runs" +
                             (diff.empty() ? "" : " (differ:" + diff + ")")};
}

Outcome threshold_monotonicity() {
  const auto bundle = ModelBundle::load(planted().a.path());
  std::size_t violations = 0;
  for (auto source : {extraction::Source::kFullGpc, extraction::Source::kApprox2d}) {
    std::set<std::string> prev;
    std::vector<double> prev_ratio(static_cast<std::size_t>(bundle.lda.n_topics()), 0.0);
    for (int i = 0; i <= 100; ++i) {
      extraction::ExtractionConfig cfg;
      cfg.threshold = i / 100.0;
      cfg.source = source;
      const auto r = bundle.report(cfg);
      std::set<std::string> cur;
      for (const auto& w : r.extracted) cur.insert(w.word);
      if (!std::includes(cur.begin(), cur.end(), prev.begin(), prev.end())) ++violations;
      for (std::size_t t = 0; t < prev_ratio.size(); ++t)
        if (r.per_topic_ratio[t] < prev_ratio[t]) ++violations;
      prev = std::move(cur);
      prev_ratio = r.per_topic_ratio;
    }
  }
  return {violations == 0, "101 thresholds x 2 sources, " + std::to_string(violations) + " violations"};
}

Outcome api_consistency() {
  service::Service svc(std::make_shared<const ModelBundle>(ModelBundle::load(planted().a.path())));
  httplib::Server server;
  service::install_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  if (port <= 0) return {false, "could not bind a port"};
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  const auto res = client.Get("/api/stopwords?threshold=0.6");
  const auto topics = client.Get("/api/topics");
  server.stop();
  listener.join();
  if (!res || !topics) return {false, "request failed"};
  const auto cli_body = testing::read_file(planted().a / "report.json");
  const auto n_topics = nlohmann::json::parse(topics->body)["topics"].size();
  const bool same = res->status == 200 && res->body == cli_body;
  return {same && n_topics == 30, std::string(same ? "identical" : "DIFFERENT") + " (" + std::to_string(res->body.size()) +
                                      " vs " + std::to_string(cli_body.size()) + " bytes), " +
                                      std::to_string(n_topics) + " topics served"};
}

}  // namespace

int main() {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  log::set_threshold(log::Level::kError);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gpc-oracle-agreement", gpc_oracle_agreement},
      {"label-flip-symmetry", label_flip_symmetry},
      {"frequency-normalization-properties", frequency_properties},
      {"planted-corpus-extraction", planted_extraction},
      {"kernel-harness", kernel_harness},
      {"approx-2d-model", approx_2d},
      {"cli-determinism", determinism},
      {"threshold-monotonicity", threshold_monotonicity},
      {"api-consistency", api_consistency},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      if (name != "gpc-oracle-agreement" && !planted().failure.empty()) throw std::runtime_error(planted().failure);
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
