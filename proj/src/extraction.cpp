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

#include "stoplens/extraction.hpp"

#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "stoplens/error.hpp"

namespace stoplens::extraction {

std::string_view source_name(Source s) { return s == Source::kFullGpc ? "full-gpc" : "approx-2d"; }

Source parse_source(std::string_view name) {
  if (name == "full-gpc") return Source::kFullGpc;
  if (name == "approx-2d") return Source::kApprox2d;
  throw InputError("unknown source '" + std::string(name) + "' (expected full-gpc or approx-2d)");
}

void ExtractionConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("threshold must lie in [0, 1]");
  if (top_k_for_ratios < 1) throw InputError("top_k_for_ratios must be >= 1");
}

StopwordReport extract(const std::vector<gpc::WordProbability>& probabilities, const ExtractionConfig& config,
                       const std::vector<std::string>& seed_stopwords) {
  config.validate();
  const std::unordered_set<std::string> seeds(seed_stopwords.begin(), seed_stopwords.end());
  std::vector<gpc::WordProbability> kept;
  for (const auto& p : probabilities) {
    if (p.p_t < config.threshold) kept.push_back(p);
  }
  gpc::sort_probabilities(kept);
  StopwordReport report;
  report.threshold = config.threshold;
  report.source = config.source;
  report.top_k = config.top_k_for_ratios;
  for (auto& p : kept) report.extracted.push_back({p.word, p.p_t, seeds.count(p.word) != 0});
  return report;
}

std::vector<double> topic_ratios(const topic::LdaModel& lda, const corpus::Vocabulary& vocab,
                                 const std::vector<gpc::WordProbability>& probabilities,
                                 const ExtractionConfig& config) {
  config.validate();
  std::unordered_map<std::string, double> pt;
  for (const auto& p : probabilities) pt.emplace(p.word, p.p_t);
  std::vector<double> ratios;
  for (int t = 0; t < lda.n_topics(); ++t) {
    const auto top = topic::top_words(lda, vocab, t, config.top_k_for_ratios);
    std::size_t stop = 0;
    for (const auto& w : top) {
      auto it = pt.find(w);
      if (it != pt.end() && it->second < config.threshold) ++stop;
    }
    ratios.push_back(top.empty() ? 0.0 : static_cast<double>(stop) / static_cast<double>(top.size()));
  }
  return ratios;
}

StopwordReport build_report(const std::vector<gpc::WordProbability>& probabilities, const topic::LdaModel& lda,
                            const corpus::Vocabulary& vocab, const std::vector<std::string>& seed_stopwords,
                            const ExtractionConfig& config) {
  auto report = extract(probabilities, config, seed_stopwords);
  report.per_topic_ratio = topic_ratios(lda, vocab, probabilities, config);
  return report;
}

std::vector<WordPt> word_pt_table(const std::vector<gpc::WordProbability>& probabilities,
                                  const std::vector<std::string>& words) {
  std::unordered_map<std::string, double> pt;
  for (const auto& p : probabilities) pt.emplace(p.word, p.p_t);
  std::vector<WordPt> out;
  for (const auto& w : words) {
    auto it = pt.find(w);
    out.push_back({w, it == pt.end() ? std::nullopt : std::optional<double>(it->second)});
  }
  return out;
}

std::string format_percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * p);
  return buf;
}

void write_stopword_list(std::ostream& os, const StopwordReport& report) {
  for (const auto& w : report.extracted) os << w.word << '\n';
}

}  // namespace stoplens::extraction
