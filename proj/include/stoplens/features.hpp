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

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "stoplens/corpus.hpp"
#include "stoplens/topic_model.hpp"

namespace stoplens::features {

/// A word's document-frequency distribution over topics, plus its
/// descending-sorted, sum-normalized form. Index h of sorted_normalized is a
/// rank position, not a topic id; dimension_to_topic maps it back.
struct SwdfVector {
  std::string word;
  std::vector<double> raw;
  std::vector<double> sorted_normalized;
  std::vector<int> dimension_to_topic;

  std::size_t dimension() const { return sorted_normalized.size(); }
  /// raw values in rank order (sorted, not normalized).
  std::vector<double> sorted_raw() const;
};

struct SwtfVector {
  std::string word;
  std::vector<double> raw;
};

/// Per-topic fraction of documents containing the word. Throws InputError
/// naming the first topic with no documents.
std::vector<double> document_frequency(const topic::TopicDocStats& stats, corpus::WordId word);
std::vector<double> document_frequency(const topic::TopicDocStats& stats, const corpus::Vocabulary& vocab,
                                       const std::string& word);

/// Stable descending sort then normalization to unit sum. Throws InputError
/// when raw has no positive entry.
SwdfVector swdf(std::vector<double> raw, std::string word = {});

/// Occurrences of the word in each topic's documents over that topic's token total.
SwtfVector term_frequency(const corpus::Corpus& corpus, const topic::LdaModel& model, const std::string& word);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

/// Population mean and standard deviation.
MeanStd mean_std(const std::vector<double>& v);

struct DfTfRow {
  std::string word;
  std::string word_class;  // "stopword" or "topicword"
  MeanStd df;
  MeanStd tf;
};

struct DfTfReport {
  std::vector<DfTfRow> rows;
  std::vector<std::string> skipped;  // out-of-vocabulary words
};

DfTfReport df_tf_report(const corpus::Corpus& corpus, const topic::LdaModel& model,
                        const std::vector<std::string>& stopwords, const std::vector<std::string>& topicwords);

/// Comma-separated table: word,class,df_mean,df_std,tf_mean,tf_std.
void write_df_tf_csv(std::ostream& os, const DfTfReport& report);

/// Closed-form entries of the two-topic extreme case: a word present in one
/// document of topic 1 (nd occurrences) and once in every document of topic 2,
/// each topic holding nd documents of nw tokens.
struct ExtremeCase {
  std::size_t nd = 0;
  std::size_t nw = 0;
  std::vector<double> dfw;  // {1/nd, 1}
  std::vector<double> tfw;  // {1/nw, 1/nw}
};
ExtremeCase extreme_case(std::size_t nd, std::size_t nw);

}  // namespace stoplens::features
