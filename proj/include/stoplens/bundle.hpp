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
#include <unordered_map>
#include <vector>

#include "stoplens/extraction.hpp"
#include "stoplens/features.hpp"
#include "stoplens/store.hpp"
#include "stoplens/topic_model.hpp"

namespace stoplens {

/// Artifact file names inside an output directory.
namespace artifact_names {
inline constexpr const char* kCorpus = "corpus.slj";
inline constexpr const char* kLda = "lda.slj";
inline constexpr const char* kGpc = "gpc.slj";
inline constexpr const char* kMatrix = "matrix.slj";
inline constexpr const char* kReport = "report.slj";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kStopwordList = "stopwords.txt";
}  // namespace artifact_names

/// Per-word probabilities for an extraction source: the full classifier's
/// p_t, or the 2-D model's aggregate trace value.
std::vector<gpc::WordProbability> probabilities_for(extraction::Source source, const store::GpcArtifact& gpc,
                                                    const store::MatrixArtifact* matrix);

/// Everything the service reads, loaded from one output directory and
/// checked to descend from the same corpus.
struct ModelBundle {
  corpus::Corpus corpus;
  std::string corpus_hash;
  topic::LdaModel lda;
  std::string lda_hash;
  std::vector<topic::Point> layout;
  topic::TopicDocStats stats;
  store::GpcArtifact gpc;
  std::string gpc_hash;
  store::MatrixArtifact matrix;
  std::vector<gpc::WordProbability> approx_probabilities;
  std::unordered_map<std::string, features::SwdfVector> features;
  std::unordered_map<std::string, std::size_t> full_index;
  std::unordered_map<std::string, std::size_t> approx_index;
  std::unordered_map<std::string, std::size_t> trace_index;

  static ModelBundle load(const std::filesystem::path& dir);

  const std::vector<gpc::WordProbability>& probabilities(extraction::Source source) const {
    return source == extraction::Source::kFullGpc ? gpc.probabilities : approx_probabilities;
  }
  extraction::StopwordReport report(const extraction::ExtractionConfig& config) const;
};

}  // namespace stoplens
