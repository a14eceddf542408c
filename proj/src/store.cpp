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

#include "stoplens/store.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace stoplens::store {

using nlohmann::json;

std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::kCorpus: return "corpus";
    case Kind::kLda: return "lda";
    case Kind::kGpc: return "gpc";
    case Kind::kMatrix: return "matrix";
    case Kind::kReport: return "report";
  }
  return "?";
}

Kind parse_kind(std::string_view name) {
  for (auto k : {Kind::kCorpus, Kind::kLda, Kind::kGpc, Kind::kMatrix, Kind::kReport}) {
    if (kind_name(k) == name) return k;
  }
  throw KindError("unknown artifact kind '" + std::string(name) + "'");
}

Kind kind_of(const Artifact& a) { return static_cast<Kind>(a.index()); }

json encode_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd decode_matrix(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw IntegrityError("matrix payload: shape does not match data length");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[i++].get<double>();
  }
  return m;
}

namespace {

json encode_vector(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd decode_vector(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json encode_tokenizer(const corpus::TokenizerConfig& c) {
  return {{"lowercase", c.lowercase},
          {"min_token_length", c.min_token_length},
          {"min_doc_count", c.min_doc_count},
          {"alphabetic_only", c.alphabetic_only}};
}

corpus::TokenizerConfig decode_tokenizer(const json& j) {
  corpus::TokenizerConfig c;
  c.lowercase = j.at("lowercase").get<bool>();
  c.min_token_length = j.at("min_token_length").get<int>();
  c.min_doc_count = j.at("min_doc_count").get<int>();
  c.alphabetic_only = j.at("alphabetic_only").get<bool>();
  return c;
}

json encode_lda_config(const topic::LdaConfig& c) {
  return {{"n_topics", c.n_topics},
          {"alpha", c.alpha ? json(*c.alpha) : json(nullptr)},
          {"beta", c.beta},
          {"sweeps", c.sweeps},
          {"burn_in", c.burn_in},
          {"sample_lag", c.sample_lag},
          {"anneal_sweeps", c.anneal_sweeps},
          {"anneal_temperature", c.anneal_temperature},
          {"seed", c.seed}};
}

topic::LdaConfig decode_lda_config(const json& j) {
  topic::LdaConfig c;
  c.n_topics = j.at("n_topics").get<int>();
  if (!j.at("alpha").is_null()) c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.sweeps = j.at("sweeps").get<int>();
  c.burn_in = j.at("burn_in").get<int>();
  c.sample_lag = j.at("sample_lag").get<int>();
  c.anneal_sweeps = j.at("anneal_sweeps").get<int>();
  c.anneal_temperature = j.at("anneal_temperature").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

json encode_training(const gpc::TrainingSet& ts) {
  return {{"inputs", encode_matrix(ts.inputs)}, {"labels", ts.labels}, {"words", ts.words}};
}

gpc::TrainingSet decode_training(const json& j) {
  gpc::TrainingSet ts;
  ts.inputs = decode_matrix(j.at("inputs"));
  ts.labels = j.at("labels").get<std::vector<int>>();
  ts.words = j.at("words").get<std::vector<std::string>>();
  return ts;
}

json encode_model(const gpc::GpcModel& m) {
  return {{"kernel", encode_kernel(m.kernel)},
          {"training", encode_training(m.training)},
          {"posterior",
           {{"f_hat", encode_vector(m.posterior.f_hat)},
            {"jitter", m.posterior.jitter},
            {"log_marginal", m.posterior.log_marginal},
            {"iterations", m.posterior.iterations}}}};
}

gpc::GpcModel decode_model(const json& j) {
  const auto& post = j.at("posterior");
  auto model = gpc::restore(decode_training(j.at("training")), decode_kernel(j.at("kernel")),
                            decode_vector(post.at("f_hat")), post.at("jitter").get<double>());
  model.posterior.iterations = post.at("iterations").get<int>();
  return model;
}

json encode_probabilities(const std::vector<gpc::WordProbability>& ps) {
  json arr = json::array();
  for (const auto& p : ps) arr.push_back({{"word", p.word}, {"p_t", p.p_t}});
  return arr;
}

std::vector<gpc::WordProbability> decode_probabilities(const json& j) {
  std::vector<gpc::WordProbability> out;
  for (const auto& e : j) out.push_back(gpc::make_probability(e.at("word").get<std::string>(), e.at("p_t").get<double>()));
  return out;
}

gpc2d::WordTrace decode_trace(const json& j) {
  gpc2d::WordTrace t;
  t.word = j.at("word").get<std::string>();
  t.aggregate_pt = j.at("aggregate_pt").get<double>();
  for (const auto& p : j.at("points")) t.points.push_back({p.at(0).get<int>(), p.at(1).get<double>(), p.at(2).get<double>()});
  return t;
}

gpc2d::GpcMatrix decode_grid(const json& j) {
  gpc2d::GpcMatrix g;
  g.n = j.at("cols").get<int>();
  g.df_cells = j.at("rows").get<int>();
  g.df_step = j.at("df_step").get<double>();
  g.values = j.at("values").get<std::vector<double>>();
  if (g.values.size() != static_cast<std::size_t>(g.n * g.df_cells)) throw IntegrityError("grid payload: shape mismatch");
  return g;
}

json encode(const CorpusArtifact& a) {
  const auto& c = a.corpus;
  return {{"doc_ids", c.doc_ids},
          {"documents", c.documents},
          {"vocabulary", {{"words", c.vocabulary.words()}, {"doc_count", c.vocabulary.doc_counts()}}},
          {"tokenizer_config", encode_tokenizer(c.tokenizer_config)}};
}

json encode(const LdaArtifact& a) {
  return {{"config", encode_lda_config(a.model.config)},
          {"phi", encode_matrix(a.model.phi)},
          {"theta", encode_matrix(a.model.theta)},
          {"dominant_topic", a.model.dominant_topic},
          {"corpus_hash", a.corpus_hash}};
}

json encode(const GpcArtifact& a) {
  return {{"model", encode_model(a.model)},
          {"probabilities", encode_probabilities(a.probabilities)},
          {"ineligible", a.ineligible},
          {"stopword_seeds", a.stopword_seeds},
          {"topicword_seeds", a.topicword_seeds},
          {"skipped", a.skipped},
          {"corpus_hash", a.corpus_hash},
          {"lda_hash", a.lda_hash}};
}

json encode(const MatrixArtifact& a) {
  json traces = json::array();
  for (const auto& t : a.traces) traces.push_back(encode_trace(t));
  return {{"model",
           {{"gpc", encode_model(a.model.model)},
            {"n", a.model.n},
            {"dim_scale", gpc2d::dim_scale_name(a.model.dim_scale)},
            {"aggregator", gpc2d::aggregator_name(a.model.aggregator)},
            {"training_words", a.model.training_words}}},
          {"grid", encode_grid(a.grid)},
          {"traces", std::move(traces)},
          {"corpus_hash", a.corpus_hash},
          {"lda_hash", a.lda_hash},
          {"gpc_hash", a.gpc_hash}};
}

json encode(const ReportArtifact& a) {
  return {{"report", encode_report(a.report)}, {"corpus_hash", a.corpus_hash}, {"gpc_hash", a.gpc_hash}};
}

}  // namespace

json encode_kernel(const gpc::Kernel& k) {
  return {{"family", gpc::family_name(k.family)},
          {"variance", k.variance},
          {"length_scale", k.length_scale},
          {"alpha", k.alpha},
          {"periodicity", k.periodicity},
          {"sigma0", k.sigma0}};
}

gpc::Kernel decode_kernel(const json& j) {
  gpc::Kernel k = gpc::Kernel::make(gpc::parse_family(j.at("family").get<std::string>()));
  k.variance = j.at("variance").get<double>();
  k.length_scale = j.at("length_scale").get<double>();
  k.alpha = j.at("alpha").get<double>();
  k.periodicity = j.at("periodicity").get<double>();
  k.sigma0 = j.at("sigma0").get<double>();
  return k;
}

json encode_report(const extraction::StopwordReport& r) {
  json extracted = json::array();
  for (const auto& w : r.extracted) extracted.push_back({{"word", w.word}, {"p_t", w.p_t}, {"universal", w.universal}});
  return {{"threshold", r.threshold},
          {"source", extraction::source_name(r.source)},
          {"top_k", r.top_k},
          {"extracted", std::move(extracted)},
          {"per_topic_ratio", r.per_topic_ratio}};
}

extraction::StopwordReport decode_report(const json& j) {
  extraction::StopwordReport r;
  r.threshold = j.at("threshold").get<double>();
  r.source = extraction::parse_source(j.at("source").get<std::string>());
  r.top_k = j.at("top_k").get<std::size_t>();
  for (const auto& e : j.at("extracted")) {
    r.extracted.push_back({e.at("word").get<std::string>(), e.at("p_t").get<double>(), e.at("universal").get<bool>()});
  }
  r.per_topic_ratio = j.at("per_topic_ratio").get<std::vector<double>>();
  return r;
}

json encode_trace(const gpc2d::WordTrace& t) {
  json pts = json::array();
  for (const auto& p : t.points) pts.push_back(json::array({p.h, p.df, p.p_t}));
  return {{"word", t.word}, {"aggregate_pt", t.aggregate_pt}, {"points", std::move(pts)}};
}

json encode_grid(const gpc2d::GpcMatrix& g) {
  return {{"rows", g.df_cells}, {"cols", g.n}, {"df_step", g.df_step}, {"values", g.values}};
}

json encode_payload(const Artifact& a) {
  return std::visit([](const auto& x) { return encode(x); }, a);
}

Artifact decode_payload(Kind kind, const json& p) {
  switch (kind) {
    case Kind::kCorpus: {
      CorpusArtifact a;
      a.corpus.doc_ids = p.at("doc_ids").get<std::vector<std::string>>();
      a.corpus.documents = p.at("documents").get<std::vector<std::vector<corpus::WordId>>>();
      const auto& v = p.at("vocabulary");
      a.corpus.vocabulary = corpus::Vocabulary(v.at("words").get<std::vector<std::string>>(),
                                               v.at("doc_count").get<std::vector<std::size_t>>());
      a.corpus.tokenizer_config = decode_tokenizer(p.at("tokenizer_config"));
      a.corpus.validate();
      return a;
    }
    case Kind::kLda: {
      LdaArtifact a;
      a.model.config = decode_lda_config(p.at("config"));
      a.model.phi = decode_matrix(p.at("phi"));
      a.model.theta = decode_matrix(p.at("theta"));
      a.model.dominant_topic = p.at("dominant_topic").get<std::vector<int>>();
      a.corpus_hash = p.at("corpus_hash").get<std::string>();
      if (a.model.dominant_topic.size() != static_cast<std::size_t>(a.model.theta.rows())) {
        throw IntegrityError("lda payload: dominant_topic length mismatch");
      }
      return a;
    }
    case Kind::kGpc: {
      GpcArtifact a;
      a.model = decode_model(p.at("model"));
      a.probabilities = decode_probabilities(p.at("probabilities"));
      a.ineligible = p.at("ineligible").get<std::vector<std::string>>();
      a.stopword_seeds = p.at("stopword_seeds").get<std::vector<std::string>>();
      a.topicword_seeds = p.at("topicword_seeds").get<std::vector<std::string>>();
      a.skipped = p.at("skipped").get<std::vector<std::string>>();
      a.corpus_hash = p.at("corpus_hash").get<std::string>();
      a.lda_hash = p.at("lda_hash").get<std::string>();
      return a;
    }
    case Kind::kMatrix: {
      MatrixArtifact a;
      const auto& m = p.at("model");
      a.model.model = decode_model(m.at("gpc"));
      a.model.n = m.at("n").get<int>();
      a.model.dim_scale = gpc2d::parse_dim_scale(m.at("dim_scale").get<std::string>());
      a.model.aggregator = gpc2d::parse_aggregator(m.at("aggregator").get<std::string>());
      a.model.training_words = m.at("training_words").get<std::size_t>();
      a.grid = decode_grid(p.at("grid"));
      for (const auto& t : p.at("traces")) a.traces.push_back(decode_trace(t));
      a.corpus_hash = p.at("corpus_hash").get<std::string>();
      a.lda_hash = p.at("lda_hash").get<std::string>();
      a.gpc_hash = p.at("gpc_hash").get<std::string>();
      return a;
    }
    case Kind::kReport: {
      ReportArtifact a;
      a.report = decode_report(p.at("report"));
      a.corpus_hash = p.at("corpus_hash").get<std::string>();
      a.gpc_hash = p.at("gpc_hash").get<std::string>();
      return a;
    }
  }
  throw KindError("unknown artifact kind");
}

std::string canonical(const json& j) { return j.dump(); }

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string content_hash(const Artifact& a) { return sha256_hex(canonical(encode_payload(a))); }

std::string timestamp_now() {
  std::time_t t = 0;
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string serialize(const Artifact& a, const std::string& created_at) {
  auto payload = encode_payload(a);
  const auto hash = sha256_hex(canonical(payload));
  json env = {{"schema_version", kSchemaVersion},
              {"kind", kind_name(kind_of(a))},
              {"created_at", created_at},
              {"content_hash", hash},
              {"payload", std::move(payload)}};
  return canonical(env) + "\n";
}

namespace {

json parse_envelope(std::string_view bytes) {
  json env;
  try {
    env = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw IntegrityError(std::string("artifact is truncated or corrupt: ") + e.what());
  }
  if (!env.is_object() || !env.contains("schema_version") || !env.contains("kind") || !env.contains("payload") ||
      !env.contains("content_hash")) {
    throw IntegrityError("artifact envelope is missing required fields");
  }
  if (!env["schema_version"].is_number_integer()) throw IntegrityError("artifact schema_version is not an integer");
  const auto version = env["schema_version"].get<int>();
  if (version != kSchemaVersion) throw VersionError("unsupported version " + std::to_string(version));
  return env;
}

}  // namespace

Artifact deserialize(std::string_view bytes) {
  auto env = parse_envelope(bytes);
  const auto kind = parse_kind(env["kind"].get<std::string>());
  const auto& payload = env["payload"];
  if (sha256_hex(canonical(payload)) != env["content_hash"].get<std::string>()) {
    throw IntegrityError("artifact content hash mismatch");
  }
  try {
    return decode_payload(kind, payload);
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("artifact payload malformed: ") + e.what());
  }
}

std::string save(const Artifact& a, const std::filesystem::path& path) {
  const auto bytes = serialize(a, timestamp_now());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move artifact into place at " + path.string());
  }
  return content_hash(a);
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open artifact " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Artifact load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

EnvelopeInfo peek(const std::filesystem::path& path) {
  auto env = parse_envelope(read_file(path));
  EnvelopeInfo info;
  info.schema_version = env["schema_version"].get<int>();
  info.kind = parse_kind(env["kind"].get<std::string>());
  info.created_at = env.value("created_at", "");
  info.content_hash = env["content_hash"].get<std::string>();
  return info;
}

}  // namespace stoplens::store
