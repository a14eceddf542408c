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

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stoplens/bundle.hpp"
#include "stoplens/corpus.hpp"
#include "stoplens/extraction.hpp"
#include "stoplens/gpc.hpp"
#include "stoplens/gpc2d.hpp"
#include "stoplens/topic_model.hpp"

namespace stoplens::pipeline {

/// A stage was run before the stage it depends on.
class StageError : public Error {
 public:
  using Error::Error;
};

struct PipelineConfig {
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> input;       // JSONL documents for ingest
  std::optional<std::filesystem::path> stopwords;   // seed stopword list; bundled default otherwise
  std::optional<std::filesystem::path> topicwords;  // seed topic words; top-2 per topic otherwise
  std::uint64_t seed = 1;
  corpus::TokenizerConfig tokenizer;
  topic::LdaConfig lda;
  gpc::KernelFamily kernel = gpc::KernelFamily::kRadialBasis;
  bool optimize = true;
  gpc::OptimizeOptions optimize_options;
  gpc2d::Gpc2dConfig gpc2d;
  extraction::ExtractionConfig extraction;

  /// Overlays keys present in a JSON config document.
  void apply_json(const nlohmann::json& j);
  static PipelineConfig from_file(const std::filesystem::path& path);
};

struct StageResult {
  std::filesystem::path artifact;
  std::string content_hash;
};

StageResult run_ingest(const PipelineConfig& cfg);
StageResult run_lda(const PipelineConfig& cfg);
StageResult run_gpc(const PipelineConfig& cfg);
StageResult run_matrix(const PipelineConfig& cfg);
/// Writes report.slj, report.json (the canonical report body) and stopwords.txt.
StageResult run_extract(const PipelineConfig& cfg);

std::vector<std::string> seed_stopwords(const PipelineConfig& cfg);

/// Word-level 2-D score: aggregate trace p_t >= 0.5 predicts label 1.
double score_2d(const gpc2d::Gpc2dModel& model, const gpc::TrainingSet& ts);

void pilot_df_tf(const PipelineConfig& cfg, std::ostream& out);

struct KernelRow {
  gpc::KernelFamily family;
  bool ok = false;
  std::string error;
  std::string kernel;
  double score = 0.0;
  double log_marginal = 0.0;
  std::size_t extracted = 0;
  std::vector<std::string> only_here;  // extracted by this kernel, not radial-basis
  std::vector<std::string> only_rbf;   // extracted by radial-basis, not this kernel
};

/// Trains every kernel family; rows sorted by score descending (failures last).
std::vector<KernelRow> pilot_kernels(const PipelineConfig& cfg, std::ostream& out);

struct TopicSweepRow {
  int k = 0;
  std::string model;  // "full" or "approx-2d"
  bool ok = false;
  std::string error;
  double score = 0.0;
  double seconds = 0.0;
};

std::vector<TopicSweepRow> pilot_topics(const PipelineConfig& cfg, const std::vector<int>& k_list, std::ostream& out);

}  // namespace stoplens::pipeline
