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

#include <filesystem>
#include <string>
#include <vector>

namespace stoplens::seeds {

/// Bundled 49-word training stopword list: 25 non-selective words followed
/// by 24 manually chosen common words.
const std::vector<std::string>& default_stopwords();

/// Reference topic-word list from a 30-topic run on a publications corpus.
/// Corpus-specific; the pipeline derives topic seeds from its own model
/// unless a list is supplied explicitly.
const std::vector<std::string>& reference_topicwords();

/// One word per line; blank lines and '#' comments ignored.
std::vector<std::string> load_word_list(const std::filesystem::path& path);

}  // namespace stoplens::seeds
