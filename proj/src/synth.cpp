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

#include "stoplens/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "stoplens/error.hpp"

namespace stoplens::synth {
namespace {

constexpr std::string_view kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr"};
constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u"};

// Three consonant-vowel syllables from a base-80 expansion of id, plus a
// style-specific suffix; unique per id.
std::string pseudo_word(int id, std::string_view suffix) {
  constexpr int base = 16 * 5;
  std::string w;
  for (int i = 0; i < 3; ++i) {
    const int s = id % base;
    id /= base;
    w += kOnsets[s / 5];
    w += kVowels[s % 5];
  }
  w += suffix;
  return w;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  int range(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
  std::size_t pick(const std::vector<double>& cdf) {
    const double u = uniform() * cdf.back();
    return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

std::string_view suffix_for(std::string_view style) {
  if (style == "news") return "n";
  if (style == "dialogue") return "x";
  return "";
}

}  // namespace

int PlantedCorpus::topic_of_word(std::string_view word) const {
  for (std::size_t t = 0; t < topic_vocab.size(); ++t) {
    if (std::find(topic_vocab[t].begin(), topic_vocab[t].end(), word) != topic_vocab[t].end()) return static_cast<int>(t);
  }
  return -1;
}

PlantedCorpus generate(const PlantedSpec& spec) {
  if (spec.n_topics < 1 || spec.n_docs < spec.n_topics) throw InputError("synth: need n_docs >= n_topics >= 1");
  if (spec.planted_per_topic > spec.topic_vocab) throw InputError("synth: planted_per_topic exceeds topic_vocab");
  PlantedCorpus out;
  out.spec = spec;
  out.stopwords = spec.stopwords;
  const auto suffix = suffix_for(spec.style);
  for (int t = 0; t < spec.n_topics; ++t) {
    std::vector<std::string> words;
    for (int k = 0; k < spec.topic_vocab; ++k) words.push_back(pseudo_word(t * 97 + k + 11, suffix));
    for (int k = 0; k < spec.planted_per_topic; ++k) out.planted_topic_words.push_back(words[static_cast<std::size_t>(k)]);
    out.topic_vocab.push_back(std::move(words));
  }
  std::vector<double> cdf;
  double acc = 0.0;
  for (int k = 0; k < spec.topic_vocab; ++k) {
    acc += 1.0 / std::pow(k + 1.0, spec.zipf);
    cdf.push_back(acc);
  }

  Rng rng(spec.seed);
  for (int d = 0; d < spec.n_docs; ++d) {
    const int t = d % spec.n_topics;
    const bool flooded = std::find(spec.flooded_topics.begin(), spec.flooded_topics.end(), t) != spec.flooded_topics.end();
    std::vector<std::string> tokens;
    int n = rng.range(spec.min_topic_tokens, spec.max_topic_tokens);
    if (flooded) n = std::max(1, n / spec.flood_shrink);
    for (int i = 0; i < n; ++i) tokens.push_back(out.topic_vocab[static_cast<std::size_t>(t)][rng.pick(cdf)]);
    for (std::size_t s = 0; s < spec.stopwords.size(); ++s) {
      // Keyed on the document's rank within its topic so every topic loses
      // the same share of each stopword.
      if ((d / spec.n_topics + static_cast<int>(s) * 7) % spec.stopword_skip_period == 0) continue;
      const int reps = flooded ? spec.flood_repeat : rng.range(1, spec.max_stopword_repeat);
      for (int r = 0; r < reps; ++r) tokens.push_back(spec.stopwords[s]);
    }
    std::shuffle(tokens.begin(), tokens.end(), rng.engine());
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) text += (i % 9 == 0) ? ", " : " ";
      text += tokens[i];
    }
    if (!text.empty()) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    text += '.';
    corpus::RawDocument doc;
    doc.id = spec.style + "-" + std::to_string(d);
    doc.text = std::move(text);
    out.docs.push_back(std::move(doc));
    out.doc_topic.push_back(t);
  }
  return out;
}

PlantedSpec planted_default() {
  PlantedSpec s;
  s.min_topic_tokens = 60;
  s.max_topic_tokens = 90;
  s.max_stopword_repeat = 1;
  s.flooded_topics = {0};
  return s;
}

PlantedSpec planted_small() {
  PlantedSpec s;
  s.n_topics = 5;
  s.n_docs = 200;
  s.topic_vocab = 10;
  s.stopwords = {"the", "of", "and", "to", "in"};
  s.seed = 11;
  return s;
}

PlantedSpec style_variant(std::string_view style) {
  PlantedSpec s;
  s.n_topics = 8;
  s.n_docs = 320;
  s.topic_vocab = 10;
  s.style = std::string(style);
  if (style == "academic") {
    s.stopwords = {"the", "of", "and", "in", "is", "this", "paper", "results"};
    s.min_topic_tokens = 40;
    s.max_topic_tokens = 70;
    s.seed = 101;
  } else if (style == "news") {
    s.stopwords = {"the", "to", "and", "said", "on", "was", "year", "new"};
    s.min_topic_tokens = 25;
    s.max_topic_tokens = 45;
    s.seed = 202;
  } else if (style == "dialogue") {
    s.stopwords = {"you", "the", "to", "it", "can", "please", "what", "help"};
    s.min_topic_tokens = 12;
    s.max_topic_tokens = 24;
    s.max_stopword_repeat = 1;
    s.seed = 303;
  } else {
    throw InputError("unknown corpus style '" + std::string(style) + "'");
  }
  return s;
}

void write_jsonl(std::ostream& os, const std::vector<corpus::RawDocument>& docs) {
  for (const auto& d : docs) os << nlohmann::json{{"id", d.id}, {"text", d.text}}.dump() << '\n';
}

}  // namespace stoplens::synth
