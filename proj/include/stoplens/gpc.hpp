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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "stoplens/corpus.hpp"
#include "stoplens/features.hpp"
#include "stoplens/kernel.hpp"
#include "stoplens/topic_model.hpp"

namespace stoplens::gpc {

/// Labelled inputs: 0 = stopword, 1 = topic word.
struct TrainingSet {
  Eigen::MatrixXd inputs;  // m x n
  std::vector<int> labels;
  std::vector<std::string> words;

  std::size_t size() const { return labels.size(); }
  Eigen::Index dimension() const { return inputs.cols(); }
  std::size_t count(int label) const;
  /// Shape, label alphabet, and both classes present.
  void validate() const;
  /// Every row is non-increasing and sums to one (a sorted, normalized Swdf).
  void validate_swdf_rows() const;
};

struct TrainingSetBuild {
  TrainingSet set;
  std::vector<std::string> stopword_seeds;   // after resolution, in row order
  std::vector<std::string> topicword_seeds;
  std::vector<std::string> skipped;          // seeds not usable, with reason
};

/// Stopword seeds become label 0. Topic-word seeds default to the top two
/// words of each topic, deduplicated, and exclude any word already seeded as
/// a stopword.
TrainingSetBuild build_training_set(const corpus::Corpus& corpus, const topic::LdaModel& model,
                                    const std::vector<std::string>& seed_stopwords,
                                    const std::optional<std::vector<std::string>>& seed_topicwords = std::nullopt,
                                    std::size_t top_n = 2);

struct LaplacePosterior {
  Eigen::VectorXd f_hat;
  Eigen::VectorXd grad;  // y - sigmoid(f_hat)
  Eigen::VectorXd w;     // sigmoid(f_hat) * (1 - sigmoid(f_hat))
  Eigen::MatrixXd cholesky_b;  // lower factor of I + W^1/2 K W^1/2
  double log_marginal = 0.0;
  double residual = 0.0;  // max |f_hat - K grad|
  int iterations = 0;
  double jitter = 0.0;
};

struct TrainOptions {
  double tolerance = 1e-8;
  int max_iterations = 100;
  int max_halvings = 10;
  double initial_jitter = 1e-10;
  double max_jitter = 1e-6;
};

struct GpcModel {
  Kernel kernel;
  TrainingSet training;
  LaplacePosterior posterior;
};

struct WordProbability {
  std::string word;
  double p_t = 0.5;
  double p_s = 0.5;
};

WordProbability make_probability(std::string word, double p_t);

double sigmoid(double z);
/// log sigmoid(z), stable for large |z|.
double log_sigmoid(double z);

/// 32-node Gauss-Hermite rule for weight exp(-x^2), weights normalized to sum 1.
struct GaussHermite {
  std::array<double, 32> nodes{};
  std::array<double, 32> weights{};
};
const GaussHermite& gauss_hermite32();

/// E[sigmoid(f)] for f ~ N(mean, var). Returns exactly 0.5 when mean is 0.
double expected_sigmoid(double mean, double var);

/// Smallest jitter in [initial, max] (decades) for which K + jitter I factors.
/// Throws NumericError when none does.
double find_jitter(const Eigen::MatrixXd& k, const TrainOptions& opt);

/// Laplace posterior for a precomputed covariance (jitter already applied).
/// `warm_a` optionally seeds Newton with f = K a (used only if it improves on f = 0).
LaplacePosterior laplace_mode(const Eigen::MatrixXd& k, const std::vector<int>& labels, const TrainOptions& opt,
                              const Eigen::VectorXd* warm_a = nullptr);

/// Rebuilds W, grad, the B factor, and the evidence from a stored mode.
LaplacePosterior posterior_from_mode(const Eigen::MatrixXd& k, const std::vector<int>& labels,
                                     const Eigen::VectorXd& f_hat, double jitter);

GpcModel train(const TrainingSet& ts, const Kernel& kernel, const TrainOptions& opt = {});

/// Re-derives the posterior for a model loaded from storage.
GpcModel restore(const TrainingSet& ts, const Kernel& kernel, const Eigen::VectorXd& f_hat, double jitter);

struct LatentPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

/// Latent predictive mean and variance for each query row.
LatentPrediction predict_latent(const GpcModel& model, const Eigen::MatrixXd& queries);
/// p_t for each query row.
Eigen::VectorXd predict_probabilities(const GpcModel& model, const Eigen::MatrixXd& queries);

WordProbability predict_pt(const GpcModel& model, const features::SwdfVector& x);
double predict_pt(const GpcModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);

/// Fraction of training rows whose prediction (p_t >= 0.5 means label 1) matches.
double score(const GpcModel& model);

/// Laplace log evidence; nullopt when the kernel is not usable or Newton fails.
std::optional<double> log_marginal(const TrainingSet& ts, const Kernel& kernel, const TrainOptions& opt = {});

struct OptimizeOptions {
  double log10_lo = -2.0;
  double log10_hi = 3.0;
  int starts = 5;
  int rounds = 3;
  double tolerance = 1e-4;  // bracket width in log10 units
  int polish_rounds = 60;   // narrow coordinate rounds after the global ones
  double polish_width = 0.25;
  TrainOptions train;
};

/// Maximizes the Laplace evidence by coordinate descent over log10 of each
/// free hyperparameter, with golden-section searches on equal sub-brackets.
Kernel optimize_hyperparameters(const TrainingSet& ts, KernelFamily family, const OptimizeOptions& opt = {});
Kernel optimize_hyperparameters(const TrainingSet& ts, const Kernel& start, const OptimizeOptions& opt);

struct ScoredWords {
  std::vector<WordProbability> probabilities;  // ascending p_t, then word
  std::vector<std::string> ineligible;
};

/// Orders by descending p_s (ascending p_t), then lexicographically.
void sort_probabilities(std::vector<WordProbability>& probabilities);

ScoredWords score_all_words(const GpcModel& model, const corpus::Corpus& corpus, const topic::LdaModel& lda);

/// Sorted, normalized Swdf for every vocabulary word with support.
struct WordFeatures {
  std::vector<features::SwdfVector> vectors;
  std::vector<std::string> ineligible;
};
WordFeatures word_features(const corpus::Corpus& corpus, const topic::LdaModel& lda);

}  // namespace stoplens::gpc
