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

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "stoplens/corpus.hpp"

namespace stoplens::synth {

/// Generator for corpora with known structure: every document belongs to
/// one planted topic and draws its content words from that topic's private
/// vocabulary; planted stopwords appear across (nearly) all documents.
struct PlantedSpec {
  int n_topics = 30;
  int n_docs = 2000;
  /// Private words per topic; the first `planted_per_topic` are the most
  /// frequent and form the planted topic words.
  int topic_vocab = 12;
  int planted_per_topic = 2;
  std::vector<std::string> stopwords = {"the", "of", "and", "to", "in", "is", "for", "with", "paper", "study"};
  /// Each stopword is left out of one document in `stopword_skip_period`.
  int stopword_skip_period = 20;
  int max_stopword_repeat = 2;
  /// Documents of these topics repeat every stopword `flood_repeat` times,
  /// so their topic carries stopwords among its top words.
  std::vector<int> flooded_topics;
  int flood_repeat = 4;
  /// Flooded documents draw this many times fewer topic tokens.
  int flood_shrink = 4;
  int min_topic_tokens = 30;
  int max_topic_tokens = 50;
  /// Zipf exponent of the within-topic word weights.
  double zipf = 1.0;
  std::uint64_t seed = 7;
  std::string style = "academic";
};

struct PlantedCorpus {
  PlantedSpec spec;
  std::vector<corpus::RawDocument> docs;
  std::vector<int> doc_topic;
  std::vector<std::vector<std::string>> topic_vocab;
  std::vector<std::string> stopwords;
  std::vector<std::string> planted_topic_words;  // topic-major

  int topic_of_word(std::string_view word) const;  // -1 if not a topic word
};

PlantedCorpus generate(const PlantedSpec& spec);

/// 30 topics, 2,000 documents, 10 stopwords, 60 planted topic words.
PlantedSpec planted_default();
/// 5 topics, 200 documents, 5 stopwords, 10 planted topic words.
PlantedSpec planted_small();
/// Style variants (academic, news, dialogue) for the multi-corpus pilot.
PlantedSpec style_variant(std::string_view style);

void write_jsonl(std::ostream& os, const std::vector<corpus::RawDocument>& docs);

}  // namespace stoplens::synth
