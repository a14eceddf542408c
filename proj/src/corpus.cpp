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

#include "stoplens/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "stoplens/error.hpp"
#include "stoplens/log.hpp"

namespace stoplens::corpus {
namespace {

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_token_char(unsigned char c, bool alphabetic_only) {
  if (is_ascii_alpha(c)) return true;
  if (alphabetic_only) return false;
  return is_ascii_digit(c) || c >= 0x80;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

void TokenizerConfig::validate() const {
  if (min_token_length < 1) throw InputError("min_token_length must be >= 1");
  if (min_doc_count < 1) throw InputError("min_doc_count must be >= 1");
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::size_t> doc_count)
    : words_(std::move(words)), doc_count_(std::move(doc_count)) {
  if (words_.size() != doc_count_.size()) throw InputError("vocabulary: size mismatch");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], static_cast<WordId>(i)).second) {
      throw InputError("vocabulary: duplicate word '" + words_[i] + "'");
    }
  }
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::n_tokens() const {
  return std::accumulate(documents.begin(), documents.end(), std::size_t{0},
                         [](std::size_t acc, const auto& d) { return acc + d.size(); });
}

void Corpus::validate() const {
  if (doc_ids.size() != documents.size()) throw InputError("corpus: doc id count mismatch");
  const auto v = vocabulary.size();
  std::vector<std::size_t> counts(v, 0);
  std::vector<std::size_t> last_seen(v, static_cast<std::size_t>(-1));
  for (std::size_t d = 0; d < documents.size(); ++d) {
    if (documents[d].empty()) throw InputError("corpus: empty document '" + doc_ids[d] + "'");
    for (auto w : documents[d]) {
      if (w >= v) throw InputError("corpus: token id out of range");
      if (last_seen[w] != d) {
        last_seen[w] = d;
        ++counts[w];
      }
    }
  }
  if (counts != vocabulary.doc_counts()) throw InputError("corpus: doc_count mismatch");
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> out;
  const auto min_len = static_cast<std::size_t>(std::max(config.min_token_length, 1));
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_token_char(static_cast<unsigned char>(text[i]), config.alphabetic_only)) ++i;
    std::size_t j = i;
    while (j < text.size() && is_token_char(static_cast<unsigned char>(text[j]), config.alphabetic_only)) ++j;
    if (j > i) {
      std::string tok(text.substr(i, j - i));
      if (config.lowercase) {
        for (auto& c : tok) {
          if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        }
      }
      if (tok.size() >= min_len) out.push_back(std::move(tok));
    }
    i = j;
  }
  return out;
}

RawDocument parse_record(std::string_view line, std::size_t line_number) {
  const auto where = "line " + std::to_string(line_number) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(where + "malformed record (" + e.what() + ")");
  }
  if (!j.is_object()) throw InputError(where + "record is not an object");
  if (!j.contains("id") || !j["id"].is_string()) throw InputError(where + "missing string field 'id'");
  if (!j.contains("text") || !j["text"].is_string()) throw InputError(where + "missing string field 'text'");
  RawDocument doc;
  doc.id = j["id"].get<std::string>();
  doc.text = j["text"].get<std::string>();
  if (doc.id.empty()) throw InputError(where + "empty id");
  if (trim(doc.text).empty()) throw InputError(where + "empty text for id '" + doc.id + "'");
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) throw InputError(where + "metadata must be an object");
    for (const auto& [k, v] : j["metadata"].items()) {
      doc.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return doc;
}

Corpus build(const std::vector<RawDocument>& docs, const TokenizerConfig& config) {
  config.validate();
  if (docs.empty()) throw InputError("no documents");

  std::unordered_set<std::string> ids;
  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(docs.size());
  std::vector<std::string> first_order;
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    if (!ids.insert(doc.id).second) throw InputError("duplicate document id '" + doc.id + "'");
    auto toks = tokenize(doc.text, config);
    std::unordered_set<std::string_view> seen;
    for (const auto& t : toks) {
      if (!seen.insert(t).second) continue;
      auto [it, inserted] = df.try_emplace(t, 0);
      if (inserted) first_order.push_back(t);
      ++it->second;
    }
    tokenized.push_back(std::move(toks));
  }

  std::vector<std::string> words;
  std::vector<std::size_t> counts;
  for (const auto& w : first_order) {
    const auto c = df.at(w);
    if (c >= static_cast<std::size_t>(config.min_doc_count)) {
      words.push_back(w);
      counts.push_back(c);
    }
  }
  Corpus corpus;
  corpus.tokenizer_config = config;
  corpus.vocabulary = Vocabulary(std::move(words), std::move(counts));

  std::size_t dropped = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::vector<WordId> ids_row;
    ids_row.reserve(tokenized[d].size());
    for (const auto& t : tokenized[d]) {
      if (auto id = corpus.vocabulary.find(t)) ids_row.push_back(*id);
    }
    if (ids_row.empty()) {
      ++dropped;
      continue;
    }
    corpus.doc_ids.push_back(docs[d].id);
    corpus.documents.push_back(std::move(ids_row));
  }
  if (dropped > 0) log::info("ingest: dropped ", dropped, " documents with no vocabulary tokens");
  if (corpus.documents.empty()) throw InputError("no documents remain after vocabulary pruning");
  return corpus;
}

Corpus ingest(std::istream& source, const TokenizerConfig& config) {
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(source, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    docs.push_back(parse_record(line, line_number));
  }
  return build(docs, config);
}

}  // namespace stoplens::corpus
