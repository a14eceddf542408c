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

#include "stoplens/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "stoplens/features.hpp"
#include "stoplens/log.hpp"
#include "stoplens/seeds.hpp"
#include "stoplens/store.hpp"

namespace stoplens::pipeline {

namespace an = artifact_names;
using nlohmann::json;

void PipelineConfig::apply_json(const json& j) {
  if (j.contains("out")) out_dir = j["out"].get<std::string>();
  if (j.contains("input")) input = j["input"].get<std::string>();
  if (j.contains("stopwords")) stopwords = j["stopwords"].get<std::string>();
  if (j.contains("topicwords")) topicwords = j["topicwords"].get<std::string>();
  if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
  if (j.contains("tokenizer")) {
    const auto& t = j["tokenizer"];
    tokenizer.lowercase = t.value("lowercase", tokenizer.lowercase);
    tokenizer.min_token_length = t.value("min_token_length", tokenizer.min_token_length);
    tokenizer.min_doc_count = t.value("min_doc_count", tokenizer.min_doc_count);
    tokenizer.alphabetic_only = t.value("alphabetic_only", tokenizer.alphabetic_only);
  }
  if (j.contains("lda")) {
    const auto& l = j["lda"];
    lda.n_topics = l.value("n_topics", lda.n_topics);
    if (l.contains("alpha") && !l["alpha"].is_null()) lda.alpha = l["alpha"].get<double>();
    lda.beta = l.value("beta", lda.beta);
    lda.sweeps = l.value("sweeps", lda.sweeps);
    lda.burn_in = l.value("burn_in", lda.burn_in);
    lda.sample_lag = l.value("sample_lag", lda.sample_lag);
    lda.anneal_sweeps = l.value("anneal_sweeps", lda.anneal_sweeps);
    lda.anneal_temperature = l.value("anneal_temperature", lda.anneal_temperature);
  }
  if (j.contains("kernel")) kernel = gpc::parse_family(j["kernel"].get<std::string>());
  if (j.contains("optimize")) optimize = j["optimize"].get<bool>();
  if (j.contains("gpc2d")) {
    const auto& g = j["gpc2d"];
    if (g.contains("kernel")) gpc2d.family = gpc::parse_family(g["kernel"].get<std::string>());
    gpc2d.optimize = g.value("optimize", gpc2d.optimize);
    gpc2d.search_words = g.value("search_words", gpc2d.search_words);
    gpc2d.words_limit = g.value("words_limit", gpc2d.words_limit);
    if (g.contains("dim_scale")) gpc2d.dim_scale = gpc2d::parse_dim_scale(g["dim_scale"].get<std::string>());
    if (g.contains("aggregator")) gpc2d.aggregator = gpc2d::parse_aggregator(g["aggregator"].get<std::string>());
  }
  if (j.contains("extraction")) {
    const auto& e = j["extraction"];
    extraction.threshold = e.value("threshold", extraction.threshold);
    if (e.contains("source")) extraction.source = extraction::parse_source(e["source"].get<std::string>());
    extraction.top_k_for_ratios = e.value("top_k", extraction.top_k_for_ratios);
  }
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  PipelineConfig cfg;
  cfg.apply_json(j);
  return cfg;
}

namespace {

std::filesystem::path require(const PipelineConfig& cfg, const char* name, const char* stage, const char* producer) {
  auto p = cfg.out_dir / name;
  if (!std::filesystem::exists(p)) {
    throw StageError(std::string(stage) + " needs " + p.string() + "; run `stoplens " + producer + "` first");
  }
  return p;
}

void ensure_out_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw store::IoError("cannot create output directory " + cfg.out_dir.string());
}

struct Loaded {
  store::CorpusArtifact corpus;
  std::string corpus_hash;
  store::LdaArtifact lda;
  std::string lda_hash;
};

Loaded load_corpus_lda(const PipelineConfig& cfg, const char* stage) {
  Loaded l;
  l.corpus = store::load_as<store::CorpusArtifact>(require(cfg, an::kCorpus, stage, "ingest"));
  l.corpus_hash = store::content_hash(l.corpus);
  l.lda = store::load_as<store::LdaArtifact>(require(cfg, an::kLda, stage, "lda"));
  l.lda_hash = store::content_hash(l.lda);
  if (l.lda.corpus_hash != l.corpus_hash) {
    throw StageError(std::string(stage) + ": lda.slj was trained on a different corpus; rerun `stoplens lda`");
  }
  return l;
}

topic::LdaConfig lda_config(const PipelineConfig& cfg) {
  auto c = cfg.lda;
  c.seed = cfg.seed;
  return c;
}

std::optional<std::vector<std::string>> seed_topicwords(const PipelineConfig& cfg) {
  if (!cfg.topicwords) return std::nullopt;
  return seeds::load_word_list(*cfg.topicwords);
}

gpc::Kernel fit_kernel(const gpc::TrainingSet& ts, gpc::KernelFamily family, const PipelineConfig& cfg) {
  if (!cfg.optimize) return gpc::Kernel::make(family);
  return gpc::optimize_hyperparameters(ts, family, cfg.optimize_options);
}

void write_csv_file(const PipelineConfig& cfg, const std::string& name, const std::string& text) {
  ensure_out_dir(cfg);
  std::ofstream out(cfg.out_dir / name, std::ios::trunc);
  if (!out) throw store::IoError("cannot write " + (cfg.out_dir / name).string());
  out << text;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

// "+[a b c]" for short lists, "+N words" otherwise; the CSV keeps them all.
std::string brief(const std::vector<std::string>& words, char sign) {
  if (words.size() > 8) return std::string(1, sign) + std::to_string(words.size()) + " words";
  return std::string(1, sign) + "[" + join(words) + "]";
}

}  // namespace

std::vector<std::string> seed_stopwords(const PipelineConfig& cfg) {
  if (cfg.stopwords) return seeds::load_word_list(*cfg.stopwords);
  return seeds::default_stopwords();
}

StageResult run_ingest(const PipelineConfig& cfg) {
  if (!cfg.input) throw InputError("ingest needs --input <documents.jsonl>");
  std::ifstream in(*cfg.input);
  if (!in) throw InputError("cannot open " + cfg.input->string());
  store::CorpusArtifact a{corpus::ingest(in, cfg.tokenizer)};
  log::info("ingest: ", a.corpus.n_docs(), " documents, ", a.corpus.vocabulary.size(), " words");
  ensure_out_dir(cfg);
  const auto path = cfg.out_dir / an::kCorpus;
  return {path, store::save(a, path)};
}

StageResult run_lda(const PipelineConfig& cfg) {
  auto corpus = store::load_as<store::CorpusArtifact>(require(cfg, an::kCorpus, "lda", "ingest"));
  store::LdaArtifact a{topic::train_lda(corpus.corpus, lda_config(cfg)), store::content_hash(corpus)};
  const auto path = cfg.out_dir / an::kLda;
  return {path, store::save(a, path)};
}

StageResult run_gpc(const PipelineConfig& cfg) {
  auto l = load_corpus_lda(cfg, "gpc");
  auto built = gpc::build_training_set(l.corpus.corpus, l.lda.model, seed_stopwords(cfg), seed_topicwords(cfg));
  for (const auto& s : built.skipped) log::info("gpc: skipped seed ", s);
  log::info("gpc: training on ", built.set.count(0), " stopwords and ", built.set.count(1), " topic words");
  const auto kernel = fit_kernel(built.set, cfg.kernel, cfg);
  store::GpcArtifact a;
  a.model = gpc::train(built.set, kernel, cfg.optimize_options.train);
  auto scored = gpc::score_all_words(a.model, l.corpus.corpus, l.lda.model);
  log::info("gpc: training score ", gpc::score(a.model));
  a.probabilities = std::move(scored.probabilities);
  a.ineligible = std::move(scored.ineligible);
  a.stopword_seeds = std::move(built.stopword_seeds);
  a.topicword_seeds = std::move(built.topicword_seeds);
  a.skipped = std::move(built.skipped);
  a.corpus_hash = l.corpus_hash;
  a.lda_hash = l.lda_hash;
  const auto path = cfg.out_dir / an::kGpc;
  return {path, store::save(a, path)};
}

StageResult run_matrix(const PipelineConfig& cfg) {
  auto l = load_corpus_lda(cfg, "matrix");
  auto g = store::load_as<store::GpcArtifact>(require(cfg, an::kGpc, "matrix", "gpc"));
  if (g.corpus_hash != l.corpus_hash || g.lda_hash != l.lda_hash) {
    throw StageError("matrix: gpc.slj is stale; rerun `stoplens gpc`");
  }
  store::MatrixArtifact a;
  a.model = gpc2d::train_2d(g.model.training, cfg.gpc2d);
  a.grid = gpc2d::matrix(a.model);
  a.traces = gpc2d::word_traces(a.model, gpc::word_features(l.corpus.corpus, l.lda.model).vectors);
  a.corpus_hash = l.corpus_hash;
  a.lda_hash = l.lda_hash;
  a.gpc_hash = store::content_hash(g);
  const auto path = cfg.out_dir / an::kMatrix;
  return {path, store::save(a, path)};
}

StageResult run_extract(const PipelineConfig& cfg) {
  auto l = load_corpus_lda(cfg, "extract");
  auto g = store::load_as<store::GpcArtifact>(require(cfg, an::kGpc, "extract", "gpc"));
  const auto gpc_hash = store::content_hash(g);
  if (g.corpus_hash != l.corpus_hash || g.lda_hash != l.lda_hash) {
    throw StageError("extract: gpc.slj is stale; rerun `stoplens gpc`");
  }
  std::optional<store::MatrixArtifact> m;
  if (cfg.extraction.source == extraction::Source::kApprox2d) {
    m = store::load_as<store::MatrixArtifact>(require(cfg, an::kMatrix, "extract --source approx-2d", "matrix"));
    if (m->gpc_hash != gpc_hash) throw StageError("extract: matrix.slj is stale; rerun `stoplens matrix`");
  }
  const auto probs = probabilities_for(cfg.extraction.source, g, m ? &*m : nullptr);
  store::ReportArtifact a;
  a.report = extraction::build_report(probs, l.lda.model, l.corpus.corpus.vocabulary, g.stopword_seeds, cfg.extraction);
  a.corpus_hash = l.corpus_hash;
  a.gpc_hash = gpc_hash;
  const auto path = cfg.out_dir / an::kReport;
  StageResult r{path, store::save(a, path)};
  {
    std::ofstream out(cfg.out_dir / an::kReportJson, std::ios::trunc | std::ios::binary);
    out << store::canonical(store::encode_report(a.report));
  }
  {
    std::ofstream out(cfg.out_dir / an::kStopwordList, std::ios::trunc);
    extraction::write_stopword_list(out, a.report);
  }
  log::info("extract: ", a.report.extracted.size(), " words below threshold ", cfg.extraction.threshold);
  return r;
}

double score_2d(const gpc2d::Gpc2dModel& model, const gpc::TrainingSet& ts) {
  std::vector<features::SwdfVector> rows;
  for (Eigen::Index r = 0; r < ts.inputs.rows(); ++r) {
    features::SwdfVector v;
    v.word = ts.words.empty() ? std::to_string(r) : ts.words[static_cast<std::size_t>(r)];
    v.sorted_normalized.assign(ts.inputs.row(r).data(), ts.inputs.row(r).data() + ts.inputs.cols());
    // Row-major copy; Eigen stores column-major.
    for (Eigen::Index c = 0; c < ts.inputs.cols(); ++c) v.sorted_normalized[static_cast<std::size_t>(c)] = ts.inputs(r, c);
    rows.push_back(std::move(v));
  }
  const auto traces = gpc2d::word_traces(model, rows);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if ((traces[i].aggregate_pt >= 0.5 ? 1 : 0) == ts.labels[i]) ++correct;
  }
  return traces.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(traces.size());
}

void pilot_df_tf(const PipelineConfig& cfg, std::ostream& out) {
  auto l = load_corpus_lda(cfg, "pilot-df-tf");
  const auto& corpus = l.corpus.corpus;
  const auto& model = l.lda.model;
  std::vector<std::string> topicwords;
  if (auto tw = seed_topicwords(cfg)) {
    topicwords = *tw;
  } else {
    std::set<std::string> seen;
    const auto stops = seed_stopwords(cfg);
    const std::set<std::string> stop_set(stops.begin(), stops.end());
    for (int t = 0; t < model.n_topics(); ++t) {
      for (const auto& w : topic::top_words(model, corpus.vocabulary, t, 2)) {
        if (stop_set.count(w) == 0 && seen.insert(w).second) topicwords.push_back(w);
      }
    }
  }
  const auto report = features::df_tf_report(corpus, model, seed_stopwords(cfg), topicwords);
  std::ostringstream csv;
  features::write_df_tf_csv(csv, report);
  write_csv_file(cfg, "pilot_df_tf.csv", csv.str());

  out << "# document vs term frequency (mean, std over topics)\n";
  out << std::left << std::setw(18) << "word" << std::setw(11) << "class" << std::right << std::setw(10) << "df_mean"
      << std::setw(10) << "df_std" << std::setw(10) << "tf_mean" << std::setw(10) << "tf_std" << '\n';
  for (const auto& r : report.rows) {
    out << std::left << std::setw(18) << r.word << std::setw(11) << r.word_class << std::right << std::setw(10)
        << fixed(r.df.mean) << std::setw(10) << fixed(r.df.std) << std::setw(10) << fixed(r.tf.mean, 5)
        << std::setw(10) << fixed(r.tf.std, 5) << '\n';
  }
  if (!report.skipped.empty()) out << "# skipped (not in vocabulary): " << join(report.skipped) << '\n';

  for (const char* cls : {"stopword", "topicword"}) {
    std::vector<double> dfm, dfs, tfm, tfs;
    for (const auto& r : report.rows) {
      if (r.word_class != cls) continue;
      dfm.push_back(r.df.mean);
      dfs.push_back(r.df.std);
      tfm.push_back(r.tf.mean);
      tfs.push_back(r.tf.std);
    }
    out << "# class " << cls << " (" << dfm.size() << " words): mean df_mean=" << fixed(features::mean_std(dfm).mean)
        << " mean df_std=" << fixed(features::mean_std(dfs).mean) << " mean tf_mean=" << fixed(features::mean_std(tfm).mean, 5)
        << " mean tf_std=" << fixed(features::mean_std(tfs).mean, 5) << '\n';
  }

  const auto ex = features::extreme_case(10, 100);
  out << "\n# two-topic extreme case (ND=" << ex.nd << ", NW=" << ex.nw << ")\n";
  out << std::left << std::setw(16) << "" << std::right << std::setw(12) << "topic 1" << std::setw(12) << "topic 2" << '\n';
  out << std::left << std::setw(16) << "docs containing" << std::right << std::setw(12) << 1 << std::setw(12) << ex.nd << '\n';
  out << std::left << std::setw(16) << "per-doc count" << std::right << std::setw(12) << ex.nd << std::setw(12) << 1 << '\n';
  out << std::left << std::setw(16) << "occurrences" << std::right << std::setw(12) << ex.nd << std::setw(12) << ex.nd << '\n';
  out << std::left << std::setw(16) << "Dfw" << std::right << std::setw(12) << fixed(ex.dfw[0]) << std::setw(12) << fixed(ex.dfw[1]) << '\n';
  out << std::left << std::setw(16) << "Tfw" << std::right << std::setw(12) << fixed(ex.tfw[0]) << std::setw(12) << fixed(ex.tfw[1]) << '\n';
}

std::vector<KernelRow> pilot_kernels(const PipelineConfig& cfg, std::ostream& out) {
  auto l = load_corpus_lda(cfg, "pilot-kernels");
  const auto built = gpc::build_training_set(l.corpus.corpus, l.lda.model, seed_stopwords(cfg), seed_topicwords(cfg));
  std::vector<KernelRow> rows;
  std::vector<std::set<std::string>> extracted;
  for (auto family : gpc::all_families()) {
    KernelRow row;
    row.family = family;
    std::set<std::string> words;
    try {
      const auto kernel = fit_kernel(built.set, family, cfg);
      const auto model = gpc::train(built.set, kernel, cfg.optimize_options.train);
      row.kernel = kernel.describe();
      row.score = gpc::score(model);
      row.log_marginal = model.posterior.log_marginal;
      const auto scored = gpc::score_all_words(model, l.corpus.corpus, l.lda.model);
      const auto report = extraction::extract(scored.probabilities, cfg.extraction, built.stopword_seeds);
      for (const auto& w : report.extracted) words.insert(w.word);
      row.extracted = words.size();
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
      log::warn("pilot-kernels: ", gpc::family_name(family), " failed: ", e.what());
    }
    rows.push_back(std::move(row));
    extracted.push_back(std::move(words));
  }
  const auto& rbf = extracted.front();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) continue;
    std::set_difference(extracted[i].begin(), extracted[i].end(), rbf.begin(), rbf.end(), std::back_inserter(rows[i].only_here));
    std::set_difference(rbf.begin(), rbf.end(), extracted[i].begin(), extracted[i].end(), std::back_inserter(rows[i].only_rbf));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const KernelRow& a, const KernelRow& b) {
    if (a.ok != b.ok) return a.ok;
    return a.score > b.score;
  });

  std::ostringstream csv;
  csv << "kernel,status,score,log_marginal,extracted,only_this,only_rbf,hyperparameters\n";
  out << "# kernel comparison (" << built.set.count(0) << " stopwords, " << built.set.count(1)
      << " topic words; threshold " << cfg.extraction.threshold << ")\n";
  out << std::left << std::setw(20) << "kernel" << std::right << std::setw(8) << "score" << std::setw(14) << "log_marginal"
      << std::setw(11) << "extracted" << "  diff vs radial-basis\n";
  for (const auto& r : rows) {
    const auto name = std::string(gpc::family_name(r.family));
    if (!r.ok) {
      out << std::left << std::setw(20) << name << "  failed: " << r.error << '\n';
      csv << name << ",failed,,,,,," << '"' << r.error << '"' << '\n';
      continue;
    }
    out << std::left << std::setw(20) << name << std::right << std::setw(8) << fixed(r.score) << std::setw(14)
        << fixed(r.log_marginal, 3) << std::setw(11) << r.extracted << "  " << brief(r.only_here, '+') << ' '
        << brief(r.only_rbf, '-') << '\n';
    csv << name << ",ok," << fixed(r.score, 6) << ',' << fixed(r.log_marginal, 6) << ',' << r.extracted << ','
        << join(r.only_here, ";") << ',' << join(r.only_rbf, ";") << ",\"" << r.kernel << "\"\n";
  }
  write_csv_file(cfg, "pilot_kernels.csv", csv.str());
  return rows;
}

std::vector<TopicSweepRow> pilot_topics(const PipelineConfig& cfg, const std::vector<int>& k_list, std::ostream& out) {
  auto corpus = store::load_as<store::CorpusArtifact>(require(cfg, an::kCorpus, "pilot-topics", "ingest"));
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  std::vector<TopicSweepRow> rows;
  for (int k : k_list) {
    TopicSweepRow full, approx;
    full.k = approx.k = k;
    full.model = "full";
    approx.model = "approx-2d";
    try {
      auto lc = lda_config(cfg);
      lc.n_topics = k;
      const auto lda = topic::train_lda(corpus.corpus, lc);
      const auto built = gpc::build_training_set(corpus.corpus, lda, seed_stopwords(cfg), seed_topicwords(cfg));
      try {
        const auto t0 = clock::now();
        const auto model = gpc::train(built.set, fit_kernel(built.set, cfg.kernel, cfg), cfg.optimize_options.train);
        full.score = gpc::score(model);
        full.seconds = secs(t0, clock::now());
        full.ok = true;
      } catch (const Error& e) {
        full.error = e.what();
      }
      try {
        const auto t0 = clock::now();
        const auto model2d = gpc2d::train_2d(built.set, cfg.gpc2d);
        approx.score = score_2d(model2d, built.set);
        approx.seconds = secs(t0, clock::now());
        approx.ok = true;
      } catch (const Error& e) {
        approx.error = e.what();
      }
    } catch (const Error& e) {
      full.error = approx.error = e.what();
    }
    rows.push_back(full);
    rows.push_back(approx);
  }
  std::ostringstream csv;
  csv << "k,model,status,score,seconds\n";
  out << "# topic-count sweep\n";
  out << std::right << std::setw(5) << "k" << "  " << std::left << std::setw(10) << "model" << std::right << std::setw(8)
      << "score" << std::setw(10) << "seconds" << '\n';
  for (const auto& r : rows) {
    if (r.ok) {
      out << std::right << std::setw(5) << r.k << "  " << std::left << std::setw(10) << r.model << std::right
          << std::setw(8) << fixed(r.score) << std::setw(10) << fixed(r.seconds, 2) << '\n';
      csv << r.k << ',' << r.model << ",ok," << fixed(r.score, 6) << ',' << fixed(r.seconds, 3) << '\n';
    } else {
      out << std::right << std::setw(5) << r.k << "  " << std::left << std::setw(10) << r.model << "  failed: " << r.error << '\n';
      csv << r.k << ',' << r.model << ",failed,,\n";
    }
  }
  // Score change from the smallest to the largest K, per model family.
  auto drop = [&](const std::string& model) -> std::optional<double> {
    const TopicSweepRow* first = nullptr;
    const TopicSweepRow* last = nullptr;
    for (const auto& r : rows) {
      if (r.model != model || !r.ok) continue;
      if (!first) first = &r;
      last = &r;
    }
    if (!first || first == last) return std::nullopt;
    return first->score - last->score;
  };
  const auto df = drop("full"), da = drop("approx-2d");
  if (df && da) {
    out << "# score drop (first K to last K): full=" << fixed(*df) << " approx-2d=" << fixed(*da)
        << (*da <= *df ? "  (2-D degrades no more than full)" : "  (2-D degraded more than full)") << '\n';
  }
  write_csv_file(cfg, "pilot_topics.csv", csv.str());
  return rows;
}

}  // namespace stoplens::pipeline
