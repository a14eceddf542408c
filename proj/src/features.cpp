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

#include "stoplens/features.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "stoplens/error.hpp"

namespace stoplens::features {

std::vector<double> SwdfVector::sorted_raw() const {
  std::vector<double> out;
  out.reserve(dimension_to_topic.size());
  for (int t : dimension_to_topic) out.push_back(raw[static_cast<std::size_t>(t)]);
  return out;
}

std::vector<double> document_frequency(const topic::TopicDocStats& stats, corpus::WordId word) {
  if (word >= stats.n_words) throw InputError("document_frequency: word id out of range");
  std::vector<double> out(static_cast<std::size_t>(stats.n_topics));
  for (int i = 0; i < stats.n_topics; ++i) {
    const auto nd = stats.doc_count[static_cast<std::size_t>(i)];
    if (nd == 0) {
      throw InputError("document_frequency: topic " + std::to_string(i) + " has no documents");
    }
    out[static_cast<std::size_t>(i)] = static_cast<double>(stats.containing(i, word)) / static_cast<double>(nd);
  }
  return out;
}

std::vector<double> document_frequency(const topic::TopicDocStats& stats, const corpus::Vocabulary& vocab,
                                       const std::string& word) {
  if (auto id = vocab.find(word)) return document_frequency(stats, *id);
  for (int i = 0; i < stats.n_topics; ++i) {
    if (stats.doc_count[static_cast<std::size_t>(i)] == 0) {
      throw InputError("document_frequency: topic " + std::to_string(i) + " has no documents");
    }
  }
  return std::vector<double>(static_cast<std::size_t>(stats.n_topics), 0.0);
}

SwdfVector swdf(std::vector<double> raw, std::string word) {
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  const bool any_positive = std::any_of(raw.begin(), raw.end(), [](double x) { return x > 0.0; });
  if (!any_positive || !(total > 0.0)) {
    throw InputError("swdf: word " + (word.empty() ? std::string("(unnamed)") : "'" + word + "'") +
                     " has no support");
  }
  SwdfVector v;
  v.word = std::move(word);
  v.dimension_to_topic.resize(raw.size());
  std::iota(v.dimension_to_topic.begin(), v.dimension_to_topic.end(), 0);
  std::stable_sort(v.dimension_to_topic.begin(), v.dimension_to_topic.end(),
                   [&](int a, int b) { return raw[static_cast<std::size_t>(a)] > raw[static_cast<std::size_t>(b)]; });
  v.sorted_normalized.reserve(raw.size());
  // Sum in rank order so permuted inputs give bit-identical output.
  double sorted_total = 0.0;
  for (int t : v.dimension_to_topic) sorted_total += raw[static_cast<std::size_t>(t)];
  for (int t : v.dimension_to_topic) v.sorted_normalized.push_back(raw[static_cast<std::size_t>(t)] / sorted_total);
  v.raw = std::move(raw);
  return v;
}

SwtfVector term_frequency(const corpus::Corpus& corpus, const topic::LdaModel& model, const std::string& word) {
  if (model.n_docs() != corpus.n_docs()) throw InputError("term_frequency: model was not trained on this corpus");
  const auto k = static_cast<std::size_t>(model.n_topics());
  std::vector<double> occurrences(k, 0.0);
  std::vector<double> totals(k, 0.0);
  const auto id = corpus.vocabulary.find(word);
  for (std::size_t d = 0; d < corpus.n_docs(); ++d) {
    const auto t = static_cast<std::size_t>(model.dominant_topic[d]);
    totals[t] += static_cast<double>(corpus.documents[d].size());
    if (id) occurrences[t] += static_cast<double>(std::count(corpus.documents[d].begin(), corpus.documents[d].end(), *id));
  }
  SwtfVector out;
  out.word = word;
  out.raw.resize(k);
  for (std::size_t t = 0; t < k; ++t) {
    if (totals[t] == 0.0) throw InputError("term_frequency: topic " + std::to_string(t) + " has no documents");
    out.raw[t] = occurrences[t] / totals[t];
  }
  return out;
}

MeanStd mean_std(const std::vector<double>& v) {
  if (v.empty()) return {};
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

DfTfReport df_tf_report(const corpus::Corpus& corpus, const topic::LdaModel& model,
                        const std::vector<std::string>& stopwords, const std::vector<std::string>& topicwords) {
  if (stopwords.empty() || topicwords.empty()) throw InputError("df_tf_report: both word lists must be non-empty");
  const auto stats = topic::topic_doc_stats(corpus, model);
  DfTfReport report;
  auto add = [&](const std::vector<std::string>& words, const char* cls) {
    for (const auto& w : words) {
      if (!corpus.vocabulary.contains(w)) {
        report.skipped.push_back(w);
        continue;
      }
      DfTfRow row;
      row.word = w;
      row.word_class = cls;
      row.df = mean_std(document_frequency(stats, corpus.vocabulary, w));
      row.tf = mean_std(term_frequency(corpus, model, w).raw);
      report.rows.push_back(std::move(row));
    }
  };
  add(stopwords, "stopword");
  add(topicwords, "topicword");
  return report;
}

void write_df_tf_csv(std::ostream& os, const DfTfReport& report) {
  os << "word,class,df_mean,df_std,tf_mean,tf_std\n";
  os << std::setprecision(17);
  for (const auto& r : report.rows) {
    os << r.word << ',' << r.word_class << ',' << r.df.mean << ',' << r.df.std << ',' << r.tf.mean << ','
       << r.tf.std << '\n';
  }
}

ExtremeCase extreme_case(std::size_t nd, std::size_t nw) {
  if (nd == 0 || nw == 0) throw InputError("extreme_case: nd and nw must be positive");
  ExtremeCase c;
  c.nd = nd;
  c.nw = nw;
  const double ndd = static_cast<double>(nd);
  const double total = ndd * static_cast<double>(nw);
  // topic 1: one document, nd occurrences; topic 2: nd documents, one occurrence each
  c.dfw = {1.0 / ndd, ndd / ndd};
  c.tfw = {ndd / total, ndd / total};
  return c;
}

}  // namespace stoplens::features
