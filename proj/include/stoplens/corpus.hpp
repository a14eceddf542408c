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
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stoplens::corpus {

using WordId = std::uint32_t;

struct TokenizerConfig {
  bool lowercase = true;
  int min_token_length = 2;
  int min_doc_count = 5;
  bool alphabetic_only = true;

  void validate() const;
  bool operator==(const TokenizerConfig&) const = default;
};

struct RawDocument {
  std::string id;
  std::string text;
  std::map<std::string, std::string> metadata;
};

/// Ordered set of distinct tokens with per-word document counts.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<std::size_t> doc_count);

  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(WordId id) const { return words_.at(id); }
  std::optional<WordId> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }
  std::size_t doc_count(WordId id) const { return doc_count_.at(id); }
  const std::vector<std::size_t>& doc_counts() const { return doc_count_; }

  bool operator==(const Vocabulary& o) const {
    return words_ == o.words_ && doc_count_ == o.doc_count_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::size_t> doc_count_;
  std::unordered_map<std::string, WordId> index_;
};

/// Tokenized documents over a pruned vocabulary. Immutable once built.
struct Corpus {
  std::vector<std::string> doc_ids;
  std::vector<std::vector<WordId>> documents;
  Vocabulary vocabulary;
  TokenizerConfig tokenizer_config;

  std::size_t n_docs() const { return documents.size(); }
  std::size_t n_tokens() const;
  /// Throws InputError if any invariant is broken.
  void validate() const;

  bool operator==(const Corpus&) const = default;
};

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config);

/// Parses one JSON document record ({"id", "text", optional "metadata"}).
RawDocument parse_record(std::string_view line, std::size_t line_number);

Corpus build(const std::vector<RawDocument>& docs, const TokenizerConfig& config);

/// Reads line-delimited JSON records and builds the corpus.
Corpus ingest(std::istream& source, const TokenizerConfig& config);

}  // namespace stoplens::corpus
