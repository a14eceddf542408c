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

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stoplens/bundle.hpp"
#include "stoplens/pipeline.hpp"
#include "stoplens/service.hpp"
#include "stoplens/store.hpp"

namespace {

using namespace stoplens;

struct Flags {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::optional<std::string> kernel;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> topicwords;
  std::optional<std::string> source;
  std::optional<int> topics;
  std::optional<int> sweeps;
  std::optional<std::size_t> words_limit;
  std::optional<std::string> aggregator;
  std::optional<std::string> dim_scale;
  bool no_optimize = false;
};

pipeline::PipelineConfig resolve(const Flags& f) {
  auto cfg = f.config ? pipeline::PipelineConfig::from_file(*f.config) : pipeline::PipelineConfig{};
  if (f.seed) cfg.seed = *f.seed;
  if (f.threshold) cfg.extraction.threshold = *f.threshold;
  if (f.kernel) cfg.kernel = gpc::parse_family(*f.kernel);
  if (f.out) cfg.out_dir = *f.out;
  if (f.input) cfg.input = *f.input;
  if (f.stopwords) cfg.stopwords = *f.stopwords;
  if (f.topicwords) cfg.topicwords = *f.topicwords;
  if (f.source) cfg.extraction.source = extraction::parse_source(*f.source);
  if (f.topics) cfg.lda.n_topics = *f.topics;
  if (f.sweeps) {
    // Keep the burn-in / sampling proportions of the default schedule.
    cfg.lda.sweeps = *f.sweeps;
    cfg.lda.burn_in = *f.sweeps * 4 / 5;
  }
  if (f.words_limit) cfg.gpc2d.words_limit = *f.words_limit;
  if (f.aggregator) cfg.gpc2d.aggregator = gpc2d::parse_aggregator(*f.aggregator);
  if (f.dim_scale) cfg.gpc2d.dim_scale = gpc2d::parse_dim_scale(*f.dim_scale);
  if (f.no_optimize) {
    cfg.optimize = false;
    cfg.gpc2d.optimize = false;
  }
  return cfg;
}

void report_stage(const char* name, const pipeline::StageResult& r) {
  std::cout << name << ": wrote " << r.artifact.string() << " (" << r.content_hash << ")\n";
}

// Runs ingest through extract on each corpus in its own subdirectory and
// tabulates size, score and wall time.
void pilot_corpora(const pipeline::PipelineConfig& base, const std::vector<std::filesystem::path>& inputs) {
  using clock = std::chrono::steady_clock;
  std::cout << "# multi-corpus run\n"
            << std::left << std::setw(28) << "corpus" << std::right << std::setw(7) << "docs" << std::setw(9)
            << "tokens" << std::setw(7) << "vocab" << std::setw(8) << "score" << std::setw(11) << "extracted"
            << std::setw(10) << "seconds" << '\n';
  std::ostringstream csv;
  csv << "corpus,docs,tokens,vocab,score,extracted,seconds\n";
  for (const auto& input : inputs) {
    auto cfg = base;
    cfg.input = input;
    cfg.out_dir = base.out_dir / input.stem();
    const auto t0 = clock::now();
    try {
      pipeline::run_ingest(cfg);
      pipeline::run_lda(cfg);
      pipeline::run_gpc(cfg);
      pipeline::run_extract(cfg);
      const double secs = std::chrono::duration<double>(clock::now() - t0).count();
      const auto c = store::load_as<store::CorpusArtifact>(cfg.out_dir / artifact_names::kCorpus);
      const auto g = store::load_as<store::GpcArtifact>(cfg.out_dir / artifact_names::kGpc);
      const auto r = store::load_as<store::ReportArtifact>(cfg.out_dir / artifact_names::kReport);
      const double score = gpc::score(g.model);
      std::cout << std::left << std::setw(28) << input.filename().string() << std::right << std::setw(7)
                << c.corpus.n_docs() << std::setw(9) << c.corpus.n_tokens() << std::setw(7)
                << c.corpus.vocabulary.size() << std::setw(8) << std::fixed << std::setprecision(4) << score
                << std::setw(11) << r.report.extracted.size() << std::setw(10) << std::setprecision(2) << secs
                << '\n';
      csv << input.filename().string() << ',' << c.corpus.n_docs() << ',' << c.corpus.n_tokens() << ','
          << c.corpus.vocabulary.size() << ',' << score << ',' << r.report.extracted.size() << ',' << secs << '\n';
    } catch (const std::exception& e) {
      std::cout << std::left << std::setw(28) << input.filename().string() << "  failed: " << e.what() << '\n';
      csv << input.filename().string() << ",failed,,,,,\n";
    }
  }
  std::filesystem::create_directories(base.out_dir);
  std::ofstream(base.out_dir / "pilot_corpora.csv", std::ios::trunc) << csv.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"StopLens: probabilistic stopword estimation from topic models"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", f.seed, "random seed (u64)");
  app.add_option("--threshold", f.threshold, "extraction threshold on p_t");
  app.add_option("--kernel", f.kernel, "kernel family");
  app.add_option("--out", f.out, "artifact directory");
  app.add_option("--input", f.input, "JSONL documents (ingest)");
  app.add_option("--stopwords", f.stopwords, "seed stopword list");
  app.add_option("--topicwords", f.topicwords, "seed topic-word list");
  app.add_option("--source", f.source, "probability source: full-gpc | approx-2d");
  app.add_option("--topics", f.topics, "number of LDA topics");
  app.add_option("--sweeps", f.sweeps, "Gibbs sweeps (burn-in scales with it)");
  app.add_option("--words-limit", f.words_limit, "2-D model: cap on training words (0 = all)");
  app.add_option("--aggregator", f.aggregator, "2-D trace aggregator: mean | geometric-mean | median");
  app.add_option("--dim-scale", f.dim_scale, "2-D dimension axis: unit | raw");
  app.add_flag("--no-optimize", f.no_optimize, "skip hyperparameter search");

  auto* ingest = app.add_subcommand("ingest", "tokenize documents into corpus.slj");
  auto* lda = app.add_subcommand("lda", "train the topic model into lda.slj");
  auto* gpc = app.add_subcommand("gpc", "train the classifier and score all words into gpc.slj");
  auto* matrix = app.add_subcommand("matrix", "train the 2-D model, grid and traces into matrix.slj");
  auto* extract = app.add_subcommand("extract", "threshold scores into report.slj and stopwords.txt");
  auto* run = app.add_subcommand("run", "ingest, lda, gpc, matrix and extract in sequence");

  auto* serve = app.add_subcommand("serve", "serve the JSON API over an artifact directory");
  std::filesystem::path bundle_dir = "out";
  service::ServeOptions serve_opts;
  std::string static_dir;
  serve->add_option("--bundle", bundle_dir, "artifact directory");
  serve->add_option("--port", serve_opts.port, "port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", serve_opts.host, "bind address");
  serve->add_option("--static", static_dir, "directory of UI assets");

  auto* pdf = app.add_subcommand("pilot-df-tf", "document vs term frequency comparison");
  auto* pk = app.add_subcommand("pilot-kernels", "compare all kernel families");
  auto* pt = app.add_subcommand("pilot-topics", "sweep the number of topics");
  std::vector<int> k_list = {5, 10, 30};
  pt->add_option("--k-list", k_list, "topic counts")->delimiter(',');
  auto* pc = app.add_subcommand("pilot-corpora", "run the pipeline on several corpora");
  std::vector<std::filesystem::path> corpora;
  pc->add_option("corpora", corpora, "JSONL corpora")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(f);
    if (ingest->parsed()) report_stage("ingest", pipeline::run_ingest(cfg));
    if (lda->parsed()) report_stage("lda", pipeline::run_lda(cfg));
    if (gpc->parsed()) report_stage("gpc", pipeline::run_gpc(cfg));
    if (matrix->parsed()) report_stage("matrix", pipeline::run_matrix(cfg));
    if (extract->parsed()) report_stage("extract", pipeline::run_extract(cfg));
    if (run->parsed()) {
      report_stage("ingest", pipeline::run_ingest(cfg));
      report_stage("lda", pipeline::run_lda(cfg));
      report_stage("gpc", pipeline::run_gpc(cfg));
      report_stage("matrix", pipeline::run_matrix(cfg));
      report_stage("extract", pipeline::run_extract(cfg));
    }
    if (serve->parsed()) {
      if (!static_dir.empty()) serve_opts.static_dir = static_dir;
      auto bundle = std::make_shared<const ModelBundle>(ModelBundle::load(bundle_dir));
      service::Service svc(std::move(bundle));
      std::cerr << "stoplens: serving " << bundle_dir.string() << " on http://" << serve_opts.host << ':'
                << serve_opts.port << '\n';
      service::serve(svc, serve_opts);
    }
    if (pdf->parsed()) pipeline::pilot_df_tf(cfg, std::cout);
    if (pk->parsed()) pipeline::pilot_kernels(cfg, std::cout);
    if (pt->parsed()) pipeline::pilot_topics(cfg, k_list, std::cout);
    if (pc->parsed()) pilot_corpora(cfg, corpora);
  } catch (const std::exception& e) {
    std::cerr << "stoplens: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
