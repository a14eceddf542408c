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


#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "stoplens/gpc.hpp"
#include "stoplens/seeds.hpp"
#include "stoplens/store.hpp"
#include "support.hpp"

using namespace stoplens;

namespace {

gpc::TrainingSet one_d(const std::vector<double>& x, const std::vector<int>& labels) {
  gpc::TrainingSet ts;
  ts.inputs.resize(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ts.inputs(static_cast<Eigen::Index>(i), 0) = x[i];
    ts.words.push_back("w" + std::to_string(i));
  }
  ts.labels = labels;
  return ts;
}

gpc::Kernel rbf(double variance, double ell) {
  auto k = gpc::Kernel::make(gpc::KernelFamily::kRadialBasis);
  k.variance = variance;
  k.length_scale = ell;
  return k;
}

double p_at(const gpc::GpcModel& m, double x) {
  Eigen::RowVectorXd q(1);
  q << x;
  return gpc::predict_pt(m, q);
}

// Twenty points on a line with overlapping classes, so the evidence has an interior
// optimum rather than running to the edge of the box.
gpc::TrainingSet noisy_line() {
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(-2.0 + 4.0 * i / 19.0);
    y.push_back(i >= 10 ? 1 : 0);
  }
  y[3] = 1;
  y[7] = 1;
  y[12] = 0;
  y[16] = 0;
  return one_d(x, y);
}

double evidence_at(const gpc::TrainingSet& ts, double log_var, double log_ell) {
  const auto lm = gpc::log_marginal(ts, rbf(std::pow(10.0, log_var), std::pow(10.0, log_ell)));
  REQUIRE(lm.has_value());
  return *lm;
}

struct SmallGpc {
  gpc::GpcModel model;
  store::GpcArtifact artifact;
  corpus::Corpus corpus;
  topic::LdaModel lda;
};

const SmallGpc& small_gpc() {
  static const SmallGpc s = [] {
    const auto& run = testing::small_run();
    SmallGpc out;
    out.artifact = store::load_as<store::GpcArtifact>(run.cfg.out_dir / "gpc.slj");
    out.model = out.artifact.model;
    out.corpus = store::load_as<store::CorpusArtifact>(run.cfg.out_dir / "corpus.slj").corpus;
    out.lda = store::load_as<store::LdaArtifact>(run.cfg.out_dir / "lda.slj").model;
    return out;
  }();
  return s;
}

}  // namespace

TEST_CASE("radial-basis kernel matches its closed form") {
  const auto k = rbf(1.7, 0.6);
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 0.5, 2.0;
  const auto g = k.gram(x);
  const auto o = oracle::rbf_gram({0.0, 0.5, 2.0}, 1.7, 0.6);
  CHECK((g - o).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("kernel grams are symmetric and positive semidefinite") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(12, 4), line(12, 1);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = u(rng);
    line(i, 0) = 3.0 * u(rng);
  }
  for (auto fam : gpc::all_families()) {
    const auto k = gpc::Kernel::make(fam);
    // The periodic kernel on Euclidean distance is only guaranteed positive semidefinite on a line.
    const Eigen::MatrixXd& in = fam == gpc::KernelFamily::kExpSineSquared ? line : x;
    const auto g = k.gram(in);
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    CHECK(gpc::parse_family(gpc::family_name(fam)) == fam);
  }
  CHECK(gpc::all_families().size() == 6);
  CHECK_THROWS(gpc::parse_family("nope"));
}

TEST_CASE("a training set needs both labels") {
  auto ts = one_d({0.0, 1.0, 2.0}, {1, 1, 1});
  CHECK_THROWS(ts.validate());
  CHECK_THROWS(gpc::train(ts, rbf(1, 1)));
  ts.labels = {0, 0, 0};
  CHECK_THROWS(gpc::train(ts, rbf(1, 1)));
  ts.labels = {0, 1, 2};
  CHECK_THROWS(gpc::train(ts, rbf(1, 1)));
}

TEST_CASE("two opposite points have opposite latent modes") {
  // 0.4 apart, so the periodic kernel (period 1) does not see the two points as one.
  const auto ts = one_d({0.0, 0.4}, {0, 1});
  for (auto fam : {gpc::KernelFamily::kRadialBasis, gpc::KernelFamily::kMatern32,
                   gpc::KernelFamily::kRationalQuadratic, gpc::KernelFamily::kExpSineSquared}) {
    auto k = gpc::Kernel::make(fam);
    k.variance = 2.5;
    const auto m = gpc::train(ts, k);
    CHECK(std::abs(m.posterior.f_hat(0) + m.posterior.f_hat(1)) <= 1e-8);
    CHECK(m.posterior.f_hat(1) > 0.0);
  }
}

TEST_CASE("three-point mode equals the fixed-point oracle") {
  const std::vector<std::vector<double>> xs = {{0.0, 0.7, 2.0}, {-1.0, 0.0, 1.0}, {0.0, 0.3, 0.6}};
  const std::vector<std::vector<int>> ys = {{0, 1, 1}, {1, 0, 1}, {0, 0, 1}};
  for (std::size_t c = 0; c < xs.size(); ++c) {
    const auto m = gpc::train(one_d(xs[c], ys[c]), rbf(1.0, 1.0));
    const auto oracle = oracle::picard_mode(oracle::rbf_gram(xs[c], 1.0, 1.0), ys[c]);
    CHECK((m.posterior.f_hat - oracle).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(m.posterior.residual <= 1e-8);
  }
}

TEST_CASE("predictive probability is close to exact grid quadrature") {
  const std::vector<double> x = {0.0, 0.8, 1.5};
  const std::vector<int> y = {0, 1, 1};
  const auto m = gpc::train(one_d(x, y), rbf(1.0, 1.0));
  for (double q : {-1.0, 0.0, 0.4, 1.0, 2.5}) {
    const double exact = oracle::exact_predictive(x, y, 1.0, 1.0, q, 61);
    CHECK(std::abs(p_at(m, q) - exact) <= 0.05);
  }
}

TEST_CASE("the query halfway between two opposite points is undecided") {
  const auto m = gpc::train(one_d({0.0, 2.0}, {0, 1}), rbf(1.3, 0.8));
  CHECK(std::abs(p_at(m, 1.0) - 0.5) <= 1e-6);
  CHECK(p_at(m, 2.0) > 0.5);
  CHECK(p_at(m, 0.0) < 0.5);
}

TEST_CASE("flipping every label mirrors the prediction") {
  const auto ts = noisy_line();
  auto flipped = ts;
  for (auto& l : flipped.labels) l = 1 - l;
  const auto a = gpc::train(ts, rbf(2.0, 0.7));
  const auto b = gpc::train(flipped, rbf(2.0, 0.7));
  for (double q = -3.0; q <= 3.0; q += 0.25) CHECK(std::abs(p_at(b, q) - (1.0 - p_at(a, q))) <= 1e-8);
}

TEST_CASE("query dimension must match the training dimension") {
  const auto m = gpc::train(one_d({0.0, 1.0}, {0, 1}), rbf(1, 1));
  Eigen::RowVectorXd q(2);
  q << 0.0, 1.0;
  CHECK_THROWS(gpc::predict_pt(m, q));
}

TEST_CASE("smoothed sigmoid agrees with direct integration") {
  CHECK(gpc::expected_sigmoid(0.0, 3.0) == 0.5);
  for (double mean : {-4.0, -1.0, 0.3, 2.0}) {
    for (double var : {0.0, 0.5, 2.0, 9.0}) {
      const double mine = gpc::expected_sigmoid(mean, var);
      const double ref = oracle::SmoothedLogistic(std::sqrt(var))(mean);
      // A 32-node rule is near exact for moderate spread and loses digits as it widens.
      CHECK(std::abs(mine - ref) <= (var <= 2.0 ? 1e-9 : 2e-5));
      CHECK(std::abs(mine + gpc::expected_sigmoid(-mean, var) - 1.0) <= 1e-15);
    }
  }
  double total = 0.0;
  for (double w : gpc::gauss_hermite32().weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("single-start and multi-start reach the grid optimum") {
  const auto ts = noisy_line();
  gpc::OptimizeOptions one;
  one.starts = 1;
  const auto a = gpc::optimize_hyperparameters(ts, gpc::KernelFamily::kRadialBasis, one);
  const auto b = gpc::optimize_hyperparameters(ts, gpc::KernelFamily::kRadialBasis, gpc::OptimizeOptions{});

  // Coarse scan of the whole box, then a fine scan around the best coarse cell.
  double best = -1e300, bv = 0, bl = 0;
  for (double lv = -2.0; lv <= 3.0 + 1e-9; lv += 0.1)
    for (double ll = -2.0; ll <= 3.0 + 1e-9; ll += 0.1) {
      const double e = evidence_at(ts, lv, ll);
      if (e > best) best = e, bv = lv, bl = ll;
    }
  const double cv = bv, cl = bl;
  for (double lv = cv - 0.1; lv <= cv + 0.1 + 1e-12; lv += 0.0025)
    for (double ll = cl - 0.1; ll <= cl + 0.1 + 1e-12; ll += 0.0025) {
      const double e = evidence_at(ts, lv, ll);
      if (e > best) best = e, bv = lv, bl = ll;
    }
  // A last pass at 1e-4 spacing around the fine winner.
  const double fv = bv, fl = bl;
  for (double lv = fv - 0.003; lv <= fv + 0.003 + 1e-12; lv += 0.0002)
    for (double ll = fl - 0.003; ll <= fl + 0.003 + 1e-12; ll += 0.0002) {
      const double e = evidence_at(ts, lv, ll);
      if (e > best) best = e, bv = lv, bl = ll;
    }
  MESSAGE("grid optimum log10(variance)=" << bv << " log10(length)=" << bl);
  REQUIRE(bv > -1.9);
  REQUIRE(bv < 2.9);
  for (const auto& k : {a, b}) {
    CHECK(std::abs(std::log10(k.variance) - bv) <= 1e-3);
    CHECK(std::abs(std::log10(k.length_scale) - bl) <= 1e-3);
  }
  CHECK(std::abs(std::log10(a.variance) - std::log10(b.variance)) <= 1e-3);
  CHECK(std::abs(std::log10(a.length_scale) - std::log10(b.length_scale)) <= 1e-3);
}

TEST_CASE("the optimum is a stationary point and beats nearby settings") {
  const auto ts = noisy_line();
  const auto k = gpc::optimize_hyperparameters(ts, gpc::KernelFamily::kRadialBasis);
  const double lv = std::log10(k.variance), ll = std::log10(k.length_scale);
  constexpr double h = 1e-4;
  const double gv = (evidence_at(ts, lv + h, ll) - evidence_at(ts, lv - h, ll)) / (2 * h);
  const double gl = (evidence_at(ts, lv, ll + h) - evidence_at(ts, lv, ll - h)) / (2 * h);
  CHECK(std::abs(gv) <= 1e-3);
  CHECK(std::abs(gl) <= 1e-3);
  const double at = evidence_at(ts, lv, ll);
  for (double fv : {0.9, 1.0, 1.1})
    for (double fl : {0.9, 1.0, 1.1}) {
      const auto lm = gpc::log_marginal(ts, rbf(k.variance * fv, k.length_scale * fl));
      CHECK(*lm <= at + 1e-12);
    }
}

TEST_CASE("a white kernel never has more evidence than an optimized radial basis") {
  const auto& s = small_gpc();
  const auto& ts = s.model.training;
  const auto r = gpc::optimize_hyperparameters(ts, gpc::KernelFamily::kRadialBasis);
  const auto w = gpc::optimize_hyperparameters(ts, gpc::KernelFamily::kWhite);
  CHECK(*gpc::log_marginal(ts, w) <= *gpc::log_marginal(ts, r));
}

TEST_CASE("predictions barely move with the starting jitter") {
  const auto ts = noisy_line();
  gpc::TrainOptions lo, hi;
  lo.initial_jitter = 1e-10;
  hi.initial_jitter = 1e-8;
  const auto a = gpc::train(ts, rbf(3.0, 0.5), lo);
  const auto b = gpc::train(ts, rbf(3.0, 0.5), hi);
  for (double q = -2.5; q <= 2.5; q += 0.1) CHECK(std::abs(p_at(a, q) - p_at(b, q)) <= 1e-4);
}

TEST_CASE("probabilities are strictly inside the unit interval and complementary") {
  const auto& s = small_gpc();
  for (const auto& p : s.artifact.probabilities) {
    CHECK(p.p_t > 0.0);
    CHECK(p.p_t < 1.0);
    CHECK(p.p_t + p.p_s == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto mp = gpc::make_probability("x", 0.25);
  CHECK(mp.p_s == 0.75);
}

TEST_CASE("training score is pure and high on the planted fixture") {
  const auto& s = small_gpc();
  const double a = gpc::score(s.model);
  CHECK(a == gpc::score(s.model));
  CHECK(a >= 0.9);

  const auto& ts = s.model.training;
  const auto white = gpc::train(ts, gpc::optimize_hyperparameters(ts, gpc::KernelFamily::kWhite));
  const double majority = static_cast<double>(std::max(ts.count(0), ts.count(1))) / static_cast<double>(ts.size());
  CHECK(std::abs(gpc::score(white) - majority) <= 0.1);
}

TEST_CASE("the training set follows the planted ground truth") {
  const auto& run = testing::small_run();
  const auto& s = small_gpc();
  const auto& ts = s.model.training;
  const std::set<std::string> planted_stop(run.truth.stopwords.begin(), run.truth.stopwords.end());
  CHECK(ts.size() == s.artifact.stopword_seeds.size() + s.artifact.topicword_seeds.size());
  CHECK(ts.count(0) == s.artifact.stopword_seeds.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts.labels[i] == 0) {
      CHECK(planted_stop.count(ts.words[i]) == 1);
    } else {
      CHECK(run.truth.topic_of_word(ts.words[i]) >= 0);
    }
  }
  // Every planted stopword survives pruning, and the bundled list covers all of them.
  CHECK(ts.count(0) == planted_stop.size());
  CHECK_NOTHROW(ts.validate_swdf_rows());

  const auto rebuilt = gpc::build_training_set(s.corpus, s.lda, seeds::default_stopwords());
  CHECK(rebuilt.set.labels == ts.labels);
  CHECK(rebuilt.set.words == ts.words);
}

TEST_CASE("seeds missing from the vocabulary are reported, not fatal") {
  const auto& s = small_gpc();
  auto list = seeds::default_stopwords();
  list.push_back("qqqqnotaword");
  const auto b = gpc::build_training_set(s.corpus, s.lda, list);
  bool found = false;
  for (const auto& sk : b.skipped) found = found || sk.find("qqqqnotaword") != std::string::npos;
  CHECK(found);
  CHECK_THROWS(gpc::build_training_set(s.corpus, s.lda, {"qqqqnotaword"}));
}

TEST_CASE("scoring every word covers the vocabulary in ascending order") {
  const auto& s = small_gpc();
  const auto scored = gpc::score_all_words(s.model, s.corpus, s.lda);
  CHECK(scored.probabilities.size() + scored.ineligible.size() == s.corpus.vocabulary.size());
  for (std::size_t i = 1; i < scored.probabilities.size(); ++i) {
    const auto& a = scored.probabilities[i - 1];
    const auto& b = scored.probabilities[i];
    CHECK((a.p_t < b.p_t || (a.p_t == b.p_t && a.word < b.word)));
  }
  CHECK(scored.probabilities.size() == s.artifact.probabilities.size());
  for (std::size_t i = 0; i < scored.probabilities.size(); ++i) {
    CHECK(scored.probabilities[i].word == s.artifact.probabilities[i].word);
    CHECK(scored.probabilities[i].p_t == s.artifact.probabilities[i].p_t);
  }
}

TEST_CASE("planted stopwords have the highest stopword probabilities") {
  const auto& run = testing::small_run();
  const auto& probs = small_gpc().artifact.probabilities;
  const std::size_t n = run.truth.stopwords.size();
  for (const auto& w : run.truth.stopwords) {
    const auto it = std::find_if(probs.begin(), probs.end(), [&](const auto& p) { return p.word == w; });
    REQUIRE(it != probs.end());
    CHECK(static_cast<std::size_t>(it - probs.begin()) < n);
  }
}

TEST_CASE("a word with a training word's profile gets the same probability") {
  const auto& s = small_gpc();
  const auto& ts = s.model.training;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::vector<double> raw(static_cast<std::size_t>(ts.dimension()));
    for (Eigen::Index h = 0; h < ts.dimension(); ++h) raw[static_cast<std::size_t>(h)] = ts.inputs(static_cast<Eigen::Index>(i), h);
    const auto twin = features::swdf(raw, "twin");
    CHECK(std::abs(gpc::predict_pt(s.model, twin).p_t - gpc::predict_pt(s.model, ts.inputs.row(static_cast<Eigen::Index>(i)))) <= 1e-12);
  }
}
