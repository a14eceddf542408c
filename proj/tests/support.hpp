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


// Shared helpers for the unit and acceptance binaries.

#pragma once

#include <stdlib.h>
#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stoplens/corpus.hpp"
#include "stoplens/log.hpp"
#include "stoplens/pipeline.hpp"
#include "stoplens/synth.hpp"
#include "stoplens/topic_model.hpp"

namespace stoplens::testing {

inline std::filesystem::path source_dir() { return STOPLENS_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return source_dir() / "data" / "fixtures" / name; }
inline std::filesystem::path test_data(const std::string& name) { return source_dir() / "tests" / "data" / name; }
inline std::string cli_path() { return STOPLENS_CLI_PATH; }

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "stoplens-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

inline corpus::TokenizerConfig loose_tokenizer() {
  corpus::TokenizerConfig t;
  t.min_doc_count = 1;
  return t;
}

inline corpus::Corpus corpus_from_texts(const std::vector<std::string>& texts,
                                        const corpus::TokenizerConfig& config = loose_tokenizer()) {
  std::vector<corpus::RawDocument> docs;
  for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back({"d" + std::to_string(i), texts[i], {}});
  return corpus::build(docs, config);
}

// Fewer sweeps than the production default; enough for the small test corpora.
inline topic::LdaConfig quick_lda(int k, std::uint64_t seed = 1) {
  topic::LdaConfig c;
  c.n_topics = k;
  c.sweeps = 300;
  c.burn_in = 200;
  c.sample_lag = 10;
  c.anneal_sweeps = 100;
  c.seed = seed;
  return c;
}

struct TwoTopicCorpus {
  corpus::Corpus corpus;
  std::vector<int> planted;  // 0 for topic A, 1 for topic B, per document
  std::vector<std::string> a_words{"xaa", "xbb", "xcc", "xdd", "xee"};
  std::vector<std::string> b_words{"yaa", "ybb", "ycc", "ydd", "yee"};
};

// 100 documents per topic, each drawn uniformly from its own five words.
inline TwoTopicCorpus two_topic_corpus(std::uint64_t seed = 3) {
  TwoTopicCorpus out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 4);
  std::vector<std::string> texts;
  for (int d = 0; d < 200; ++d) {
    const int topic = d % 2;
    const auto& words = topic == 0 ? out.a_words : out.b_words;
    std::string text;
    for (int t = 0; t < 20; ++t) text += words[static_cast<std::size_t>(pick(rng))] + " ";
    texts.push_back(text);
    out.planted.push_back(topic);
  }
  out.corpus = corpus_from_texts(texts);
  return out;
}

// Full pipeline over the bundled 200-document fixture, built once per process.
struct SmallRun {
  TempDir dir;
  pipeline::PipelineConfig cfg;
  synth::PlantedCorpus truth;
};

inline pipeline::PipelineConfig small_config(const std::filesystem::path& out) {
  pipeline::PipelineConfig cfg;
  cfg.out_dir = out;
  cfg.input = fixture("small_200.jsonl");
  cfg.lda.n_topics = 5;
  return cfg;
}

inline void run_all(const pipeline::PipelineConfig& cfg) {
  pipeline::run_ingest(cfg);
  pipeline::run_lda(cfg);
  pipeline::run_gpc(cfg);
  pipeline::run_matrix(cfg);
  pipeline::run_extract(cfg);
}

inline const SmallRun& small_run() {
  static const std::unique_ptr<SmallRun> run = [] {
    log::set_threshold(log::Level::kError);
    auto r = std::make_unique<SmallRun>();
    r->cfg = small_config(r->dir.path());
    r->truth = synth::generate(synth::planted_small());
    run_all(r->cfg);
    return r;
  }();
  return *run;
}

}  // namespace stoplens::testing
