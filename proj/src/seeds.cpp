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

#include "stoplens/seeds.hpp"

#include <fstream>

#include "stoplens/error.hpp"

namespace stoplens::seeds {

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = {
      // non-selective
      "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "has", "he", "in", "is", "it", "its", "of",
      "on", "that", "the", "to", "was", "were", "will", "with",
      // manually chosen
      "able", "after", "allow", "another", "appear", "became", "because", "cause", "come", "can", "each", "given",
      "get", "have", "know", "little", "main", "none", "same", "small", "some", "thank", "try", "very"};
  return words;
}

const std::vector<std::string>& reference_topicwords() {
  static const std::vector<std::string> words = {
      "age",       "antenna", "bacterium", "cell",     "code",     "cognitive", "complex",  "data",   "design",
      "energy",    "equation", "exposure", "flow",     "gas",      "habitat",   "health",   "image",  "inf",
      "language",  "laser",   "market",    "mechanical", "method", "model",     "network",  "oil",    "optical",
      "pore",      "pressure", "process",  "protein",  "quantum",  "reaction",  "research", "risk",   "soil",
      "species",   "state",   "strain",    "stress",   "study",    "surface",   "system",   "temperature",
      "theory",    "this",    "tissue",    "toxicity", "use",      "water",     "wave"};
  return words;
}

std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open word list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace stoplens::seeds
