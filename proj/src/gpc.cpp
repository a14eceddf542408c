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

#include "stoplens/gpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

#include "stoplens/error.hpp"
#include "stoplens/log.hpp"

namespace stoplens::gpc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double clamp_probability(double p) {
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(p, lo, hi);
}

Eigen::VectorXd label_signs(const std::vector<int>& labels) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) s(static_cast<Eigen::Index>(i)) = labels[i] == 1 ? 1.0 : -1.0;
  return s;
}

double log_likelihood(const Eigen::VectorXd& f, const Eigen::VectorXd& signs) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) total += log_sigmoid(signs(i) * f(i));
  return total;
}

struct LikelihoodTerms {
  Eigen::VectorXd grad;
  Eigen::VectorXd w;
};

LikelihoodTerms likelihood_terms(const Eigen::VectorXd& f, const Eigen::VectorXd& signs) {
  LikelihoodTerms t{Eigen::VectorXd(f.size()), Eigen::VectorXd(f.size())};
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double pi = sigmoid(f(i));
    const double y = signs(i) > 0.0 ? 1.0 : 0.0;
    t.grad(i) = y - pi;
    t.w(i) = pi * (1.0 - pi);
  }
  return t;
}

Eigen::MatrixXd b_matrix(const Eigen::MatrixXd& k, const Eigen::VectorXd& sw) {
  Eigen::MatrixXd b = sw.asDiagonal() * k * sw.asDiagonal();
  b.diagonal().array() += 1.0;
  return b;
}

}  // namespace

std::size_t TrainingSet::count(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void TrainingSet::validate() const {
  if (static_cast<std::size_t>(inputs.rows()) != labels.size()) throw InputError("training set: input/label count mismatch");
  if (!words.empty() && words.size() != labels.size()) throw InputError("training set: word/label count mismatch");
  if (labels.size() < 2) throw InputError("training set: need at least 2 rows");
  for (int y : labels) {
    if (y != 0 && y != 1) throw InputError("training set: labels must be 0 or 1");
  }
  if (count(0) == 0 || count(1) == 0) throw InputError("training set: both classes must be present");
  if (!inputs.allFinite()) throw InputError("training set: non-finite input");
}

void TrainingSet::validate_swdf_rows() const {
  for (Eigen::Index r = 0; r < inputs.rows(); ++r) {
    const auto row = inputs.row(r);
    for (Eigen::Index c = 1; c < row.size(); ++c) {
      if (row(c) > row(c - 1)) throw InputError("training set: row " + std::to_string(r) + " is not non-increasing");
    }
    if (std::abs(row.sum() - 1.0) > 1e-12) throw InputError("training set: row " + std::to_string(r) + " does not sum to 1");
  }
}

TrainingSetBuild build_training_set(const corpus::Corpus& corpus, const topic::LdaModel& model,
                                    const std::vector<std::string>& seed_stopwords,
                                    const std::optional<std::vector<std::string>>& seed_topicwords, std::size_t top_n) {
  const auto stats = topic::topic_doc_stats(corpus, model);
  const auto& vocab = corpus.vocabulary;
  TrainingSetBuild out;
  std::vector<features::SwdfVector> rows;
  std::vector<int> labels;

  std::unordered_set<std::string> stop_set(seed_stopwords.begin(), seed_stopwords.end());
  std::unordered_set<std::string> used;
  auto take = [&](const std::string& w, int label, std::vector<std::string>& resolved) {
    if (!used.insert(w).second) return;
    const auto id = vocab.find(w);
    if (!id) {
      out.skipped.push_back(w + " (not in vocabulary)");
      return;
    }
    auto df = features::document_frequency(stats, *id);
    if (std::none_of(df.begin(), df.end(), [](double x) { return x > 0.0; })) {
      out.skipped.push_back(w + " (no support)");
      return;
    }
    rows.push_back(features::swdf(std::move(df), w));
    labels.push_back(label);
    resolved.push_back(w);
  };

  for (const auto& w : seed_stopwords) take(w, 0, out.stopword_seeds);

  std::vector<std::string> topic_candidates;
  if (seed_topicwords) {
    topic_candidates = *seed_topicwords;
  } else {
    for (int t = 0; t < model.n_topics(); ++t) {
      for (auto& w : topic::top_words(model, vocab, t, top_n)) topic_candidates.push_back(std::move(w));
    }
  }
  std::unordered_set<std::string> topic_seen;
  for (const auto& w : topic_candidates) {
    if (!topic_seen.insert(w).second) continue;
    if (stop_set.count(w) != 0) {
      out.skipped.push_back(w + " (already a stopword seed)");
      continue;
    }
    take(w, 1, out.topicword_seeds);
  }

  if (out.stopword_seeds.empty()) throw InputError("training set: no stopword seeds resolved in the vocabulary");
  if (out.topicword_seeds.empty()) throw InputError("training set: no topic-word seeds resolved in the vocabulary");

  const auto n = static_cast<Eigen::Index>(model.n_topics());
  out.set.inputs.resize(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < n; ++c) out.set.inputs(static_cast<Eigen::Index>(r), c) = rows[r].sorted_normalized[static_cast<std::size_t>(c)];
    out.set.words.push_back(rows[r].word);
  }
  out.set.labels = std::move(labels);
  out.set.validate();
  out.set.validate_swdf_rows();
  return out;
}

WordProbability make_probability(std::string word, double p_t) {
  return {std::move(word), p_t, 1.0 - p_t};
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

const GaussHermite& gauss_hermite32() {
  static const GaussHermite rule = [] {
    constexpr int n = 32;
    // Golub-Welsch on the Jacobi matrix of the physicists' Hermite recurrence.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    GaussHermite gh;
    for (int i = 0; i < n; ++i) {
      gh.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
      const double v0 = eig.eigenvectors()(0, i);
      gh.weights[static_cast<std::size_t>(i)] = v0 * v0;
    }
    // Enforce exact mirror symmetry of the rule.
    for (int i = 0; i < n / 2; ++i) {
      const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
      const double x = 0.5 * (gh.nodes[hi] - gh.nodes[lo]);
      const double w = 0.5 * (gh.weights[hi] + gh.weights[lo]);
      gh.nodes[lo] = -x;
      gh.nodes[hi] = x;
      gh.weights[lo] = gh.weights[hi] = w;
    }
    double total = 0.0;
    for (double w : gh.weights) total += w;
    for (double& w : gh.weights) w /= total;
    return gh;
  }();
  return rule;
}

double expected_sigmoid(double mean, double var) {
  const auto& gh = gauss_hermite32();
  const double s = std::sqrt(2.0 * std::max(var, 0.0));
  // sigmoid(z) = (1 + tanh(z/2)) / 2; summing mirrored node pairs keeps the
  // result odd in the mean, so mean 0 gives exactly 0.5.
  double acc = 0.0;
  for (std::size_t i = 16; i < 32; ++i) {
    const double x = s * gh.nodes[i];
    acc += gh.weights[i] * (std::tanh(0.5 * (mean + x)) + std::tanh(0.5 * (mean - x)));
  }
  return clamp_probability(0.5 + 0.5 * acc);
}

double find_jitter(const Eigen::MatrixXd& k, const TrainOptions& opt) {
  for (double jitter = opt.initial_jitter; jitter <= opt.max_jitter * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite()) return jitter;
  }
  throw NumericError("kernel matrix is not positive semi-definite (jitter up to " + std::to_string(opt.max_jitter) + ")");
}

LaplacePosterior posterior_from_mode(const Eigen::MatrixXd& k, const std::vector<int>& labels,
                                     const Eigen::VectorXd& f_hat, double jitter) {
  const auto signs = label_signs(labels);
  auto terms = likelihood_terms(f_hat, signs);
  const Eigen::VectorXd sw = terms.w.array().sqrt();
  Eigen::LLT<Eigen::MatrixXd> llt(b_matrix(k, sw));
  if (llt.info() != Eigen::Success) throw NumericError("laplace: B matrix factorization failed");
  LaplacePosterior post;
  post.f_hat = f_hat;
  post.grad = std::move(terms.grad);
  post.w = std::move(terms.w);
  post.cholesky_b = llt.matrixL();
  post.residual = (f_hat - k * post.grad).lpNorm<Eigen::Infinity>();
  post.log_marginal = -0.5 * f_hat.dot(post.grad) + log_likelihood(f_hat, signs) -
                      post.cholesky_b.diagonal().array().log().sum();
  post.jitter = jitter;
  return post;
}

LaplacePosterior laplace_mode(const Eigen::MatrixXd& k, const std::vector<int>& labels, const TrainOptions& opt,
                              const Eigen::VectorXd* warm_a) {
  const auto m = k.rows();
  const auto signs = label_signs(labels);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  double psi = log_likelihood(f, signs);
  if (warm_a != nullptr && warm_a->size() == m) {
    // The objective is concave in f, so any start reaches the same mode;
    // keep the warm one only when it is already better than the origin.
    const Eigen::VectorXd f_warm = k * *warm_a;
    const double psi_warm = -0.5 * warm_a->dot(f_warm) + log_likelihood(f_warm, signs);
    if (psi_warm > psi) {
      a = *warm_a;
      f = f_warm;
      psi = psi_warm;
    }
  }
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (;; ++it) {
    const auto terms = likelihood_terms(f, signs);
    residual = (f - k * terms.grad).lpNorm<Eigen::Infinity>();
    if (residual <= opt.tolerance || it >= opt.max_iterations) break;
    const Eigen::VectorXd sw = terms.w.array().sqrt();
    Eigen::LLT<Eigen::MatrixXd> llt(b_matrix(k, sw));
    if (llt.info() != Eigen::Success) throw NumericError("laplace: B matrix factorization failed");
    const Eigen::VectorXd b = terms.w.cwiseProduct(f) + terms.grad;
    const Eigen::VectorXd a_new = b - sw.cwiseProduct(llt.solve(sw.cwiseProduct(k * b)));
    const Eigen::VectorXd f_new = k * a_new;
    double step = 1.0;
    Eigen::VectorXd a_try = a_new;
    Eigen::VectorXd f_try = f_new;
    double psi_try = -0.5 * a_try.dot(f_try) + log_likelihood(f_try, signs);
    // Near the mode psi changes by less than its rounding error; a step that
    // loses only that much is still accepted.
    const double slack = 1e-12 * std::max(1.0, std::abs(psi));
    for (int h = 0; h < opt.max_halvings && !(psi_try >= psi - slack); ++h) {
      step *= 0.5;
      a_try = a + step * (a_new - a);
      f_try = f + step * (f_new - f);
      psi_try = -0.5 * a_try.dot(f_try) + log_likelihood(f_try, signs);
    }
    a = std::move(a_try);
    f = std::move(f_try);
    psi = psi_try;
  }
  if (!(residual <= opt.tolerance)) {
    throw NumericError("laplace: Newton did not converge after " + std::to_string(it) +
                       " iterations (residual " + std::to_string(residual) + ")");
  }
  auto post = posterior_from_mode(k, labels, f, 0.0);
  post.iterations = it;
  return post;
}

GpcModel train(const TrainingSet& ts, const Kernel& kernel, const TrainOptions& opt) {
  ts.validate();
  kernel.validate();
  Eigen::MatrixXd k = kernel.gram(ts.inputs);
  const double jitter = find_jitter(k, opt);
  k.diagonal().array() += jitter;
  GpcModel model{kernel, ts, laplace_mode(k, ts.labels, opt)};
  model.posterior.jitter = jitter;
  return model;
}

GpcModel restore(const TrainingSet& ts, const Kernel& kernel, const Eigen::VectorXd& f_hat, double jitter) {
  ts.validate();
  kernel.validate();
  if (f_hat.size() != static_cast<Eigen::Index>(ts.size())) throw InputError("restore: mode size mismatch");
  Eigen::MatrixXd k = kernel.gram(ts.inputs);
  k.diagonal().array() += jitter;
  return GpcModel{kernel, ts, posterior_from_mode(k, ts.labels, f_hat, jitter)};
}

LatentPrediction predict_latent(const GpcModel& model, const Eigen::MatrixXd& queries) {
  if (queries.cols() != model.training.dimension()) {
    throw InputError("predict: query dimension " + std::to_string(queries.cols()) + " != training dimension " +
                     std::to_string(model.training.dimension()));
  }
  const auto& post = model.posterior;
  const Eigen::VectorXd sw = post.w.array().sqrt();
  LatentPrediction out;
  out.mean.resize(queries.rows());
  out.variance.resize(queries.rows());
  // Blocks bound the cross-covariance footprint for large training sets.
  constexpr Eigen::Index kBlock = 512;
  for (Eigen::Index start = 0; start < queries.rows(); start += kBlock) {
    const auto len = std::min(kBlock, queries.rows() - start);
    const Eigen::MatrixXd block = queries.middleRows(start, len);
    const Eigen::MatrixXd ks = model.kernel.cross(model.training.inputs, block);
    out.mean.segment(start, len) = ks.transpose() * post.grad;
    const Eigen::MatrixXd v = post.cholesky_b.triangularView<Eigen::Lower>().solve(sw.asDiagonal() * ks);
    for (Eigen::Index j = 0; j < len; ++j) {
      out.variance(start + j) = std::max(model.kernel.self(block.row(j)) - v.col(j).squaredNorm(), 0.0);
    }
  }
  return out;
}

Eigen::VectorXd predict_probabilities(const GpcModel& model, const Eigen::MatrixXd& queries) {
  const auto latent = predict_latent(model, queries);
  Eigen::VectorXd p(queries.rows());
  for (Eigen::Index j = 0; j < p.size(); ++j) p(j) = expected_sigmoid(latent.mean(j), latent.variance(j));
  return p;
}

double predict_pt(const GpcModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  Eigen::MatrixXd q = x;
  return predict_probabilities(model, q)(0);
}

WordProbability predict_pt(const GpcModel& model, const features::SwdfVector& x) {
  if (static_cast<Eigen::Index>(x.dimension()) != model.training.dimension()) {
    throw InputError("predict_pt: word '" + x.word + "' has dimension " + std::to_string(x.dimension()) +
                     ", model expects " + std::to_string(model.training.dimension()));
  }
  const Eigen::RowVectorXd row = Eigen::Map<const Eigen::RowVectorXd>(x.sorted_normalized.data(),
                                                                      static_cast<Eigen::Index>(x.dimension()));
  return make_probability(x.word, predict_pt(model, row));
}

double score(const GpcModel& model) {
  const auto p = predict_probabilities(model, model.training.inputs);
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const int predicted = p(i) >= 0.5 ? 1 : 0;
    if (predicted == model.training.labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(p.size());
}

namespace {

std::optional<double> evidence(const TrainingSet& ts, const Kernel& kernel, const TrainOptions& opt,
                               Eigen::VectorXd* warm_a) {
  try {
    kernel.validate();
    Eigen::MatrixXd k = kernel.gram(ts.inputs);
    const double jitter = find_jitter(k, opt);
    k.diagonal().array() += jitter;
    const auto post = laplace_mode(k, ts.labels, opt, warm_a);
    if (!std::isfinite(post.log_marginal)) return std::nullopt;
    if (warm_a != nullptr) *warm_a = post.grad;
    return post.log_marginal;
  } catch (const Error& e) {
    log::debug("log_marginal: ", kernel.describe(), " failed: ", e.what());
    return std::nullopt;
  }
}

}  // namespace

std::optional<double> log_marginal(const TrainingSet& ts, const Kernel& kernel, const TrainOptions& opt) {
  ts.validate();
  return evidence(ts, kernel, opt, nullptr);
}

Kernel optimize_hyperparameters(const TrainingSet& ts, KernelFamily family, const OptimizeOptions& opt) {
  return optimize_hyperparameters(ts, Kernel::make(family), opt);
}

Kernel optimize_hyperparameters(const TrainingSet& ts, const Kernel& start, const OptimizeOptions& opt) {
  ts.validate();
  const auto params = start.free_params();
  if (params.size() > 2) throw InputError("optimize_hyperparameters: at most two free hyperparameters");
  Kernel current = start;
  // Each evaluation starts Newton from the previous mode.
  Eigen::VectorXd warm;
  double current_value = evidence(ts, current, opt.train, &warm).value_or(kNegInf);
  bool any_success = std::isfinite(current_value);

  // Golden-section search of one coordinate over [lo, hi] split into `segments` brackets.
  // Returns how far the coordinate moved.
  auto line_search = [&](HyperParam p, double lo, double hi, int segments) {
    auto eval = [&](double log10_value) {
      Kernel k = current;
      k.set(p, std::pow(10.0, log10_value));
      const auto v = evidence(ts, k, opt.train, &warm);
      if (v) any_success = true;
      return v.value_or(kNegInf);
    };
    const double before = std::log10(current.get(p));
    double best_x = before;
    double best_value = current_value;
    auto consider = [&](double x, double v) {
      if (v > best_value) {
        best_value = v;
        best_x = x;
      }
    };
    const double width = (hi - lo) / segments;
    constexpr double ratio = 0.6180339887498949;
    for (int s = 0; s < segments; ++s) {
      double a = lo + s * width;
      double b = a + width;
      double c = b - ratio * (b - a);
      double d = a + ratio * (b - a);
      double fc = eval(c), fd = eval(d);
      while (b - a > opt.tolerance) {
        if (fc >= fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - ratio * (b - a);
          fc = eval(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + ratio * (b - a);
          fd = eval(d);
        }
      }
      const double mid = 0.5 * (a + b);
      consider(mid, eval(mid));
      consider(c, fc);
      consider(d, fd);
    }
    current.set(p, std::pow(10.0, best_x));
    current_value = best_value;
    return std::abs(best_x - before);
  };

  for (int round = 0; round < opt.rounds; ++round) {
    for (auto p : params) line_search(p, opt.log10_lo, opt.log10_hi, std::max(opt.starts, 1));
  }
  // Coordinate steps crawl along a tilted ridge, so keep taking narrow ones until a
  // whole round stands still.
  if (std::isfinite(current_value)) {
    for (int round = 0; round < opt.polish_rounds; ++round) {
      double moved = 0.0;
      for (auto p : params) {
        const double x = std::log10(current.get(p));
        const double lo = std::max(opt.log10_lo, x - opt.polish_width);
        const double hi = std::min(opt.log10_hi, x + opt.polish_width);
        moved = std::max(moved, line_search(p, lo, hi, 1));
      }
      if (moved < opt.tolerance) break;
    }
  }
  if (!any_success || !std::isfinite(current_value)) {
    throw NumericError("optimize_hyperparameters: every evidence evaluation failed for " +
                       std::string(family_name(start.family)));
  }
  log::info("gpc: optimized ", current.describe(), " log_marginal=", current_value);
  return current;
}

void sort_probabilities(std::vector<WordProbability>& probabilities) {
  std::sort(probabilities.begin(), probabilities.end(), [](const WordProbability& a, const WordProbability& b) {
    if (a.p_s != b.p_s) return a.p_s > b.p_s;
    return a.word < b.word;
  });
}

WordFeatures word_features(const corpus::Corpus& corpus, const topic::LdaModel& lda) {
  const auto stats = topic::topic_doc_stats(corpus, lda);
  WordFeatures out;
  for (corpus::WordId id = 0; id < corpus.vocabulary.size(); ++id) {
    auto df = features::document_frequency(stats, id);
    if (std::none_of(df.begin(), df.end(), [](double x) { return x > 0.0; })) {
      out.ineligible.push_back(corpus.vocabulary.word(id));
      continue;
    }
    out.vectors.push_back(features::swdf(std::move(df), corpus.vocabulary.word(id)));
  }
  return out;
}

ScoredWords score_all_words(const GpcModel& model, const corpus::Corpus& corpus, const topic::LdaModel& lda) {
  auto feats = word_features(corpus, lda);
  ScoredWords out;
  out.ineligible = std::move(feats.ineligible);
  const auto n = model.training.dimension();
  Eigen::MatrixXd q(static_cast<Eigen::Index>(feats.vectors.size()), n);
  for (std::size_t r = 0; r < feats.vectors.size(); ++r) {
    if (static_cast<Eigen::Index>(feats.vectors[r].dimension()) != n) throw InputError("score_all_words: dimension mismatch");
    for (Eigen::Index c = 0; c < n; ++c) q(static_cast<Eigen::Index>(r), c) = feats.vectors[r].sorted_normalized[static_cast<std::size_t>(c)];
  }
  const auto p = predict_probabilities(model, q);
  out.probabilities.reserve(feats.vectors.size());
  for (std::size_t r = 0; r < feats.vectors.size(); ++r) {
    out.probabilities.push_back(make_probability(feats.vectors[r].word, p(static_cast<Eigen::Index>(r))));
  }
  sort_probabilities(out.probabilities);
  return out;
}

}  // namespace stoplens::gpc
