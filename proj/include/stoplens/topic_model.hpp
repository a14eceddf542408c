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

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stoplens/corpus.hpp"

namespace stoplens::topic {

struct LdaConfig {
  int n_topics = 30;
  /// Symmetric document-topic prior; unset means 50 / n_topics.
  std::optional<double> alpha;
  double beta = 0.01;
  int sweeps = 1000;
  int burn_in = 800;
  /// Post-burn-in sweeps between accumulated samples; 0 keeps only the final state.
  int sample_lag = 10;
  /// The first `anneal_sweeps` sweeps (capped at burn_in) sample from the
  /// conditional raised to 1/T, with T falling linearly from
  /// `anneal_temperature` to 1. This only shapes the discarded burn-in; it
  /// lets merged topics separate before sampling proper begins.
  int anneal_sweeps = 500;
  double anneal_temperature = 2.0;
  std::uint64_t seed = 1;

  double effective_alpha() const { return alpha.value_or(50.0 / n_topics); }
  void validate() const;
  bool operator==(const LdaConfig&) const = default;
};

struct LdaModel {
  Eigen::MatrixXd phi;    // K x V
  Eigen::MatrixXd theta;  // D x K
  std::vector<int> dominant_topic;
  LdaConfig config;

  int n_topics() const { return static_cast<int>(phi.rows()); }
  std::size_t n_words() const { return static_cast<std::size_t>(phi.cols()); }
  std::size_t n_docs() const { return static_cast<std::size_t>(theta.rows()); }
};

/// Document counts per topic under the dominant-topic partition.
struct TopicDocStats {
  int n_topics = 0;
  std::size_t n_words = 0;
  std::vector<std::size_t> doc_count;         // Nd_i
  std::vector<std::size_t> containing_count;  // K x V row-major, Nd_i w_j

  std::size_t containing(int topic, corpus::WordId word) const {
    return containing_count[static_cast<std::size_t>(topic) * n_words + word];
  }
};

/// Lowest index wins ties.
int argmax_topic(const Eigen::Ref<const Eigen::RowVectorXd>& row);

/// Collapsed Gibbs sampler over shared count tables. Exposed so tests can
/// step sweeps and inspect the counts between them.
class GibbsSampler {
 public:
  GibbsSampler(const corpus::Corpus& corpus, const LdaConfig& config);

  void sweep();
  /// Temperature the next sweep uses.
  double temperature() const;
  /// Adds (phi, theta) point estimates of the current state to the running average.
  void accumulate();
  LdaModel finish() const;

  int sweeps_done() const { return sweeps_done_; }
  std::size_t total_tokens() const { return topic_assign_.size(); }
  /// Sums of each count table; all three equal total_tokens() in a consistent state.
  std::size_t doc_topic_total() const;
  std::size_t word_topic_total() const;
  std::size_t topic_total() const;
  bool counts_consistent() const;

 private:
  double uniform();

  const corpus::Corpus& corpus_;
  LdaConfig config_;
  int k_;
  std::size_t v_;
  double alpha_;
  double beta_;
  std::mt19937_64 rng_;
  std::vector<int> topic_assign_;      // per token, document-major
  std::vector<std::size_t> doc_start_;
  std::vector<std::int32_t> n_dk_;     // D x K
  std::vector<std::int32_t> n_wk_;     // V x K
  std::vector<std::int64_t> n_k_;
  std::vector<double> prob_;
  // Tempered factor tables, rebuilt per annealed sweep.
  std::vector<double> doc_pow_;
  std::vector<double> word_pow_;
  std::vector<double> topic_pow_;
  Eigen::MatrixXd phi_sum_;
  Eigen::MatrixXd theta_sum_;
  int samples_ = 0;
  int sweeps_done_ = 0;
};

LdaModel train_lda(const corpus::Corpus& corpus, const LdaConfig& config);

TopicDocStats topic_doc_stats(const corpus::Corpus& corpus, const LdaModel& model);

/// Word ids sorted by phi descending, ties broken by word string.
std::vector<corpus::WordId> top_word_ids(const LdaModel& model, const corpus::Vocabulary& vocab,
                                         int topic, std::size_t n);
std::vector<std::string> top_words(const LdaModel& model, const corpus::Vocabulary& vocab, int topic,
                                   std::size_t n);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Square root of the base-2 Jensen-Shannon divergence; lies in [0, 1].
double js_distance(const Eigen::Ref<const Eigen::RowVectorXd>& p, const Eigen::Ref<const Eigen::RowVectorXd>& q);

/// Classical MDS of a symmetric distance matrix into 2-D, before rescaling.
/// Each axis is sign-fixed so its largest-magnitude entry is positive.
std::vector<Point> classical_mds(const Eigen::MatrixXd& distances);

/// Translates and uniformly scales points into the unit square.
std::vector<Point> rescale_unit(std::vector<Point> points);

/// Topic positions in [0,1]^2 from MDS over Jensen-Shannon distances of phi rows.
std::vector<Point> topic_layout(const LdaModel& model);

}  // namespace stoplens::topic
