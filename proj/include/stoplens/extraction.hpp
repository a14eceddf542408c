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

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "stoplens/corpus.hpp"
#include "stoplens/gpc.hpp"
#include "stoplens/topic_model.hpp"

namespace stoplens::extraction {

enum class Source { kFullGpc, kApprox2d };

std::string_view source_name(Source s);
Source parse_source(std::string_view name);

struct ExtractionConfig {
  double threshold = 0.60;
  Source source = Source::kFullGpc;
  std::size_t top_k_for_ratios = 20;

  void validate() const;
};

struct ExtractedWord {
  std::string word;
  double p_t = 0.0;
  bool universal = false;  // the word was a stopword seed
};

struct StopwordReport {
  double threshold = 0.0;
  Source source = Source::kFullGpc;
  std::size_t top_k = 20;
  std::vector<ExtractedWord> extracted;  // ascending p_t, then word
  std::vector<double> per_topic_ratio;
};

/// Words with p_t strictly below the threshold.
StopwordReport extract(const std::vector<gpc::WordProbability>& probabilities, const ExtractionConfig& config,
                       const std::vector<std::string>& seed_stopwords);

/// Per topic, the fraction of its top-k words with p_t below the threshold.
/// Unscored words count as topic words.
std::vector<double> topic_ratios(const topic::LdaModel& lda, const corpus::Vocabulary& vocab,
                                 const std::vector<gpc::WordProbability>& probabilities,
                                 const ExtractionConfig& config);

StopwordReport build_report(const std::vector<gpc::WordProbability>& probabilities, const topic::LdaModel& lda,
                            const corpus::Vocabulary& vocab, const std::vector<std::string>& seed_stopwords,
                            const ExtractionConfig& config);

struct WordPt {
  std::string word;
  std::optional<double> p_t;  // empty when the word is not scored
};

std::vector<WordPt> word_pt_table(const std::vector<gpc::WordProbability>& probabilities,
                                  const std::vector<std::string>& words);

/// "12.56%"-style rendering of a probability.
std::string format_percent(double p);

/// One extracted word per line.
void write_stopword_list(std::ostream& os, const StopwordReport& report);

}  // namespace stoplens::extraction
