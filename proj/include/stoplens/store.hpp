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

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stoplens/corpus.hpp"
#include "stoplens/error.hpp"
#include "stoplens/extraction.hpp"
#include "stoplens/gpc.hpp"
#include "stoplens/gpc2d.hpp"
#include "stoplens/topic_model.hpp"

namespace stoplens::store {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kExtension = ".slj";

enum class Kind { kCorpus, kLda, kGpc, kMatrix, kReport };
std::string_view kind_name(Kind k);
Kind parse_kind(std::string_view name);

/// Stored bytes fail to parse or do not match their content hash.
class IntegrityError : public Error {
 public:
  using Error::Error;
};
class VersionError : public Error {
 public:
  using Error::Error;
};
class KindError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

struct CorpusArtifact {
  corpus::Corpus corpus;
};

struct LdaArtifact {
  topic::LdaModel model;
  std::string corpus_hash;
};

struct GpcArtifact {
  gpc::GpcModel model;
  std::vector<gpc::WordProbability> probabilities;
  std::vector<std::string> ineligible;
  std::vector<std::string> stopword_seeds;
  std::vector<std::string> topicword_seeds;
  std::vector<std::string> skipped;
  std::string corpus_hash;
  std::string lda_hash;
};

struct MatrixArtifact {
  gpc2d::Gpc2dModel model;
  gpc2d::GpcMatrix grid;
  std::vector<gpc2d::WordTrace> traces;
  std::string corpus_hash;
  std::string lda_hash;
  std::string gpc_hash;
};

struct ReportArtifact {
  extraction::StopwordReport report;
  std::string corpus_hash;
  std::string gpc_hash;
};

using Artifact = std::variant<CorpusArtifact, LdaArtifact, GpcArtifact, MatrixArtifact, ReportArtifact>;

Kind kind_of(const Artifact& a);

// Payload codecs. Encoders emit plain JSON values; canonical bytes come from dump().
nlohmann::json encode_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd decode_matrix(const nlohmann::json& j);
nlohmann::json encode_kernel(const gpc::Kernel& k);
gpc::Kernel decode_kernel(const nlohmann::json& j);
nlohmann::json encode_report(const extraction::StopwordReport& r);
extraction::StopwordReport decode_report(const nlohmann::json& j);
nlohmann::json encode_trace(const gpc2d::WordTrace& t);
nlohmann::json encode_grid(const gpc2d::GpcMatrix& g);
nlohmann::json encode_payload(const Artifact& a);
Artifact decode_payload(Kind kind, const nlohmann::json& payload);

/// Canonical text for an object: sorted keys, no whitespace, shortest
/// round-trip doubles.
std::string canonical(const nlohmann::json& j);
std::string sha256_hex(std::string_view bytes);
std::string content_hash(const Artifact& a);

/// UTC timestamp; SOURCE_DATE_EPOCH overrides the wall clock.
std::string timestamp_now();

/// Full file contents for an artifact (envelope + trailing newline).
std::string serialize(const Artifact& a, const std::string& created_at);
Artifact deserialize(std::string_view bytes);

/// Atomic write (temp file + rename). Returns the content hash.
std::string save(const Artifact& a, const std::filesystem::path& path);
Artifact load(const std::filesystem::path& path);

struct EnvelopeInfo {
  int schema_version = 0;
  Kind kind = Kind::kCorpus;
  std::string created_at;
  std::string content_hash;
};
EnvelopeInfo peek(const std::filesystem::path& path);

template <typename T>
T load_as(const std::filesystem::path& path) {
  auto a = load(path);
  if (auto* p = std::get_if<T>(&a)) return std::move(*p);
  throw KindError(path.string() + ": artifact is a " + std::string(kind_name(kind_of(a))) + ", not the expected kind");
}

}  // namespace stoplens::store
