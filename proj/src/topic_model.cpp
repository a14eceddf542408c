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

#include "stoplens/topic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stoplens/error.hpp"
#include "stoplens/log.hpp"

namespace stoplens::topic {

void LdaConfig::validate() const {
  if (n_topics < 1) throw InputError("n_topics must be >= 1");
  if (effective_alpha() <= 0.0) throw InputError("alpha must be > 0");
  if (beta <= 0.0) throw InputError("beta must be > 0");
  if (sweeps < 1) throw InputError("sweeps must be >= 1");
  if (burn_in < 0 || burn_in >= sweeps) throw InputError("burn_in must satisfy 0 <= burn_in < sweeps");
  if (sample_lag < 0) throw InputError("sample_lag must be >= 0");
  if (anneal_sweeps < 0) throw InputError("anneal_sweeps must be >= 0");
  if (!(anneal_temperature >= 1.0)) throw InputError("anneal_temperature must be >= 1");
}

int argmax_topic(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int best = 0;
  for (int k = 1; k < row.size(); ++k) {
    if (row(k) > row(best)) best = k;
  }
  return best;
}

GibbsSampler::GibbsSampler(const corpus::Corpus& corpus, const LdaConfig& config)
    : corpus_(corpus),
      config_(config),
      k_(config.n_topics),
      v_(corpus.vocabulary.size()),
      alpha_(config.effective_alpha()),
      beta_(config.beta),
      rng_(config.seed) {
  config.validate();
  if (corpus.n_docs() == 0 || corpus.n_tokens() == 0) throw InputError("train_lda: empty corpus");
  if (v_ < static_cast<std::size_t>(k_)) {
    log::warn("train_lda: vocabulary size ", v_, " is smaller than topic count ", k_);
  }
  const auto d = corpus.n_docs();
  const auto k = static_cast<std::size_t>(k_);
  n_dk_.assign(d * k, 0);
  n_wk_.assign(v_ * k, 0);
  n_k_.assign(k, 0);
  prob_.assign(k, 0.0);
  doc_start_.reserve(d + 1);
  topic_assign_.reserve(corpus.n_tokens());
  for (std::size_t doc = 0; doc < d; ++doc) {
    doc_start_.push_back(topic_assign_.size());
    for (auto w : corpus.documents[doc]) {
      const int z = static_cast<int>(uniform() * k_) % k_;
      topic_assign_.push_back(z);
      ++n_dk_[doc * k + z];
      ++n_wk_[w * k + z];
      ++n_k_[z];
    }
  }
  doc_start_.push_back(topic_assign_.size());
  phi_sum_ = Eigen::MatrixXd::Zero(k_, static_cast<Eigen::Index>(v_));
  theta_sum_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), k_);
}

double GibbsSampler::uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double GibbsSampler::temperature() const {
  const int span = std::min(config_.anneal_sweeps, config_.burn_in);
  if (sweeps_done_ >= span || config_.anneal_temperature == 1.0) return 1.0;
  const double t0 = config_.anneal_temperature;
  return t0 - (t0 - 1.0) * static_cast<double>(sweeps_done_) / static_cast<double>(span);
}

void GibbsSampler::sweep() {
  const auto k = static_cast<std::size_t>(k_);
  const double vbeta = static_cast<double>(v_) * beta_;
  const double temp = temperature();
  if (temp != 1.0) {
    // (n + prior)^(1/T) for every count a table can hold this sweep.
    const double e = 1.0 / temp;
    std::size_t max_doc = 0;
    for (const auto& doc : corpus_.documents) max_doc = std::max(max_doc, doc.size());
    doc_pow_.resize(max_doc + 1);
    for (std::size_t n = 0; n <= max_doc; ++n) doc_pow_[n] = std::pow(static_cast<double>(n) + alpha_, e);
    const std::size_t total = topic_assign_.size();
    std::size_t max_word = 0;
    for (std::size_t w = 0; w < v_; ++w) {
      std::size_t c = 0;
      for (std::size_t j = 0; j < k; ++j) c += static_cast<std::size_t>(n_wk_[w * k + j]);
      max_word = std::max(max_word, c);
    }
    word_pow_.resize(max_word + 1);
    for (std::size_t n = 0; n <= max_word; ++n) word_pow_[n] = std::pow(static_cast<double>(n) + beta_, e);
    topic_pow_.resize(total + 1);
    for (std::size_t n = 0; n <= total; ++n) topic_pow_[n] = std::pow(static_cast<double>(n) + vbeta, -e);
  }
  for (std::size_t doc = 0; doc < corpus_.n_docs(); ++doc) {
    const auto& words = corpus_.documents[doc];
    std::int32_t* ndk = &n_dk_[doc * k];
    for (std::size_t t = 0; t < words.size(); ++t) {
      const auto w = words[t];
      int& z = topic_assign_[doc_start_[doc] + t];
      std::int32_t* nwk = &n_wk_[w * k];
      --ndk[z];
      --nwk[z];
      --n_k_[z];
      double total = 0.0;
      if (temp == 1.0) {
        for (std::size_t j = 0; j < k; ++j) {
          total += (ndk[j] + alpha_) * (nwk[j] + beta_) / (static_cast<double>(n_k_[j]) + vbeta);
          prob_[j] = total;
        }
      } else {
        for (std::size_t j = 0; j < k; ++j) {
          total += doc_pow_[static_cast<std::size_t>(ndk[j])] * word_pow_[static_cast<std::size_t>(nwk[j])] *
                   topic_pow_[static_cast<std::size_t>(n_k_[j])];
          prob_[j] = total;
        }
      }
      const double u = uniform() * total;
      std::size_t nz = 0;
      while (nz + 1 < k && prob_[nz] <= u) ++nz;
      z = static_cast<int>(nz);
      ++ndk[z];
      ++nwk[z];
      ++n_k_[z];
    }
  }
  ++sweeps_done_;
}

void GibbsSampler::accumulate() {
  const auto k = static_cast<std::size_t>(k_);
  const double vbeta = static_cast<double>(v_) * beta_;
  for (std::size_t j = 0; j < k; ++j) {
    const double denom = static_cast<double>(n_k_[j]) + vbeta;
    for (std::size_t w = 0; w < v_; ++w) {
      phi_sum_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(w)) += (n_wk_[w * k + j] + beta_) / denom;
    }
  }
  const double kalpha = static_cast<double>(k) * alpha_;
  for (std::size_t doc = 0; doc < corpus_.n_docs(); ++doc) {
    const double denom = static_cast<double>(corpus_.documents[doc].size()) + kalpha;
    for (std::size_t j = 0; j < k; ++j) {
      theta_sum_(static_cast<Eigen::Index>(doc), static_cast<Eigen::Index>(j)) += (n_dk_[doc * k + j] + alpha_) / denom;
    }
  }
  ++samples_;
}

LdaModel GibbsSampler::finish() const {
  if (samples_ == 0) throw NumericError("train_lda: no samples accumulated");
  LdaModel model;
  model.config = config_;
  model.phi = phi_sum_ / samples_;
  model.theta = theta_sum_ / samples_;
  // Renormalize rows so averaging round-off never drifts from the simplex.
  for (Eigen::Index r = 0; r < model.phi.rows(); ++r) model.phi.row(r) /= model.phi.row(r).sum();
  for (Eigen::Index r = 0; r < model.theta.rows(); ++r) model.theta.row(r) /= model.theta.row(r).sum();
  model.dominant_topic.resize(static_cast<std::size_t>(model.theta.rows()));
  for (Eigen::Index r = 0; r < model.theta.rows(); ++r) {
    model.dominant_topic[static_cast<std::size_t>(r)] = argmax_topic(model.theta.row(r));
  }
  return model;
}

std::size_t GibbsSampler::doc_topic_total() const {
  return static_cast<std::size_t>(std::accumulate(n_dk_.begin(), n_dk_.end(), std::int64_t{0}));
}
std::size_t GibbsSampler::word_topic_total() const {
  return static_cast<std::size_t>(std::accumulate(n_wk_.begin(), n_wk_.end(), std::int64_t{0}));
}
std::size_t GibbsSampler::topic_total() const {
  return static_cast<std::size_t>(std::accumulate(n_k_.begin(), n_k_.end(), std::int64_t{0}));
}

bool GibbsSampler::counts_consistent() const {
  const auto n = total_tokens();
  if (doc_topic_total() != n || word_topic_total() != n || topic_total() != n) return false;
  auto nonneg = [](const auto& v) { return std::all_of(v.begin(), v.end(), [](auto x) { return x >= 0; }); };
  return nonneg(n_dk_) && nonneg(n_wk_) && nonneg(n_k_);
}

LdaModel train_lda(const corpus::Corpus& corpus, const LdaConfig& config) {
  GibbsSampler sampler(corpus, config);
  for (int s = 1; s <= config.sweeps; ++s) {
    sampler.sweep();
    const int after = s - config.burn_in;
    if (after > 0) {
      if (config.sample_lag == 0 ? s == config.sweeps : after % config.sample_lag == 0) sampler.accumulate();
    }
    if (s % 100 == 0) log::info("lda: sweep ", s, "/", config.sweeps);
  }
  // A lag that skips the final sweep can leave no samples on short runs.
  if (config.sample_lag > 0 && (config.sweeps - config.burn_in) < config.sample_lag) sampler.accumulate();
  return sampler.finish();
}

TopicDocStats topic_doc_stats(const corpus::Corpus& corpus, const LdaModel& model) {
  if (model.n_docs() != corpus.n_docs() || model.n_words() != corpus.vocabulary.size()) {
    throw InputError("topic_doc_stats: model was not trained on this corpus");
  }
  TopicDocStats stats;
  stats.n_topics = model.n_topics();
  stats.n_words = corpus.vocabulary.size();
  stats.doc_count.assign(static_cast<std::size_t>(stats.n_topics), 0);
  stats.containing_count.assign(static_cast<std::size_t>(stats.n_topics) * stats.n_words, 0);
  std::vector<std::size_t> last_seen(stats.n_words, static_cast<std::size_t>(-1));
  for (std::size_t d = 0; d < corpus.n_docs(); ++d) {
    const auto topic = static_cast<std::size_t>(model.dominant_topic[d]);
    ++stats.doc_count[topic];
    for (auto w : corpus.documents[d]) {
      if (last_seen[w] == d) continue;
      last_seen[w] = d;
      ++stats.containing_count[topic * stats.n_words + w];
    }
  }
  return stats;
}

std::vector<corpus::WordId> top_word_ids(const LdaModel& model, const corpus::Vocabulary& vocab,
                                         int topic, std::size_t n) {
  if (topic < 0 || topic >= model.n_topics()) {
    throw InputError("top_words: topic " + std::to_string(topic) + " out of range");
  }
  if (vocab.size() != model.n_words()) throw InputError("top_words: vocabulary mismatch");
  std::vector<corpus::WordId> ids(vocab.size());
  std::iota(ids.begin(), ids.end(), corpus::WordId{0});
  const auto row = model.phi.row(topic);
  auto before = [&](corpus::WordId a, corpus::WordId b) {
    if (row(a) != row(b)) return row(a) > row(b);
    return vocab.word(a) < vocab.word(b);
  };
  const auto take = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take), ids.end(), before);
  ids.resize(take);
  return ids;
}

std::vector<std::string> top_words(const LdaModel& model, const corpus::Vocabulary& vocab, int topic,
                                   std::size_t n) {
  std::vector<std::string> out;
  for (auto id : top_word_ids(model, vocab, topic, n)) out.push_back(vocab.word(id));
  return out;
}

double js_distance(const Eigen::Ref<const Eigen::RowVectorXd>& p, const Eigen::Ref<const Eigen::RowVectorXd>& q) {
  double js = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p(i) + q(i));
    if (p(i) > 0.0) js += 0.5 * p(i) * std::log2(p(i) / m);
    if (q(i) > 0.0) js += 0.5 * q(i) * std::log2(q(i) / m);
  }
  return std::sqrt(std::max(js, 0.0));
}

std::vector<Point> classical_mds(const Eigen::MatrixXd& distances) {
  const auto n = distances.rows();
  if (n != distances.cols()) throw InputError("classical_mds: distance matrix must be square");
  const Eigen::MatrixXd d2 = distances.array().square().matrix();
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd b = -0.5 * centering * d2 * centering;
  b = 0.5 * (b + b.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  // Eigenvalues ascend; take the two largest.
  std::vector<Point> pts(static_cast<std::size_t>(n));
  for (int axis = 0; axis < 2; ++axis) {
    const auto col = n - 1 - axis;
    if (col < 0) break;
    const double lambda = std::max(eig.eigenvalues()(col), 0.0);
    Eigen::VectorXd v = eig.eigenvectors().col(col) * std::sqrt(lambda);
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < n; ++i) {
      if (std::abs(v(i)) > std::abs(v(big)) + 1e-12) big = i;
    }
    if (v(big) < 0.0) v = -v;
    for (Eigen::Index i = 0; i < n; ++i) {
      (axis == 0 ? pts[static_cast<std::size_t>(i)].x : pts[static_cast<std::size_t>(i)].y) = v(i);
    }
  }
  return pts;
}

std::vector<Point> rescale_unit(std::vector<Point> points) {
  if (points.empty()) return points;
  auto [minx, maxx] = std::minmax_element(points.begin(), points.end(),
                                          [](const Point& a, const Point& b) { return a.x < b.x; });
  auto [miny, maxy] = std::minmax_element(points.begin(), points.end(),
                                          [](const Point& a, const Point& b) { return a.y < b.y; });
  const double x0 = minx->x, y0 = miny->y;
  const double span = std::max(maxx->x - x0, maxy->y - y0);
  for (auto& p : points) {
    if (span <= 1e-15) {
      p = {0.5, 0.5};
    } else {
      p.x = std::clamp((p.x - x0) / span, 0.0, 1.0);
      p.y = std::clamp((p.y - y0) / span, 0.0, 1.0);
    }
  }
  return points;
}

std::vector<Point> topic_layout(const LdaModel& model) {
  const int k = model.n_topics();
  if (k < 2) throw InputError("topic_layout: need at least 2 topics");
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      dist(i, j) = dist(j, i) = js_distance(model.phi.row(i), model.phi.row(j));
    }
  }
  return rescale_unit(classical_mds(dist));
}

}  // namespace stoplens::topic
