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

#include "stoplens/bundle.hpp"

#include "stoplens/gpc.hpp"

namespace stoplens {

std::vector<gpc::WordProbability> probabilities_for(extraction::Source source, const store::GpcArtifact& gpc,
                                                    const store::MatrixArtifact* matrix) {
  if (source == extraction::Source::kFullGpc) return gpc.probabilities;
  if (matrix == nullptr) throw InputError("approx-2d source requires the matrix artifact");
  std::vector<gpc::WordProbability> out;
  out.reserve(matrix->traces.size());
  for (const auto& t : matrix->traces) out.push_back(gpc::make_probability(t.word, t.aggregate_pt));
  gpc::sort_probabilities(out);
  return out;
}

ModelBundle ModelBundle::load(const std::filesystem::path& dir) {
  namespace an = artifact_names;
  ModelBundle b;
  auto corpus = store::load_as<store::CorpusArtifact>(dir / an::kCorpus);
  b.corpus_hash = store::content_hash(corpus);
  b.corpus = std::move(corpus.corpus);
  auto lda = store::load_as<store::LdaArtifact>(dir / an::kLda);
  b.lda_hash = store::content_hash(lda);
  b.lda = std::move(lda.model);
  b.gpc = store::load_as<store::GpcArtifact>(dir / an::kGpc);
  b.gpc_hash = store::content_hash(b.gpc);
  b.matrix = store::load_as<store::MatrixArtifact>(dir / an::kMatrix);
  if (lda.corpus_hash != b.corpus_hash || b.gpc.corpus_hash != b.corpus_hash ||
      b.matrix.corpus_hash != b.corpus_hash) {
    throw InputError("bundle: artifacts were not trained from the same corpus");
  }
  if (b.gpc.lda_hash != b.lda_hash || b.matrix.lda_hash != b.lda_hash || b.matrix.gpc_hash != b.gpc_hash) {
    throw InputError("bundle: artifacts were not trained from the same model chain");
  }
  b.layout = topic::topic_layout(b.lda);
  b.stats = topic::topic_doc_stats(b.corpus, b.lda);
  for (auto& v : gpc::word_features(b.corpus, b.lda).vectors) {
    auto word = v.word;
    b.features.emplace(std::move(word), std::move(v));
  }
  b.approx_probabilities = probabilities_for(extraction::Source::kApprox2d, b.gpc, &b.matrix);
  for (std::size_t i = 0; i < b.gpc.probabilities.size(); ++i) b.full_index.emplace(b.gpc.probabilities[i].word, i);
  for (std::size_t i = 0; i < b.approx_probabilities.size(); ++i) b.approx_index.emplace(b.approx_probabilities[i].word, i);
  for (std::size_t i = 0; i < b.matrix.traces.size(); ++i) b.trace_index.emplace(b.matrix.traces[i].word, i);
  return b;
}

extraction::StopwordReport ModelBundle::report(const extraction::ExtractionConfig& config) const {
  return extraction::build_report(probabilities(config.source), lda, corpus.vocabulary, gpc.stopword_seeds, config);
}

}  // namespace stoplens
