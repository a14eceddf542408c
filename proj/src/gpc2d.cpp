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

#include "stoplens/gpc2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stoplens/error.hpp"
#include "stoplens/log.hpp"

namespace stoplens::gpc2d {

std::string_view aggregator_name(Aggregator a) {
  switch (a) {
    case Aggregator::kMean: return "mean";
    case Aggregator::kGeometricMean: return "geometric-mean";
    case Aggregator::kMedian: return "median";
  }
  return "?";
}

Aggregator parse_aggregator(std::string_view name) {
  if (name == "mean") return Aggregator::kMean;
  if (name == "geometric-mean" || name == "geomean") return Aggregator::kGeometricMean;
  if (name == "median") return Aggregator::kMedian;
  throw InputError("unknown aggregator '" + std::string(name) + "'");
}

std::string_view dim_scale_name(DimScale s) { return s == DimScale::kUnit ? "unit" : "raw"; }

DimScale parse_dim_scale(std::string_view name) {
  if (name == "unit") return DimScale::kUnit;
  if (name == "raw") return DimScale::kRaw;
  throw InputError("unknown dimension scale '" + std::string(name) + "'");
}

Gpc2dTrainingSet build_2d_training(const gpc::TrainingSet& ts) {
  ts.validate();
  Gpc2dTrainingSet out;
  out.n = static_cast<int>(ts.dimension());
  out.words = ts.words;
  if (out.words.empty()) {
    for (std::size_t i = 0; i < ts.size(); ++i) out.words.push_back("#" + std::to_string(i));
  }
  out.rows.reserve(ts.size() * static_cast<std::size_t>(out.n));
  for (std::size_t m = 0; m < ts.size(); ++m) {
    for (int h = 1; h <= out.n; ++h) {
      out.rows.push_back({ts.inputs(static_cast<Eigen::Index>(m), h - 1), h, ts.labels[m], m});
    }
  }
  return out;
}

std::vector<std::size_t> stratified_subset(const std::vector<int>& labels, std::size_t limit) {
  std::vector<std::size_t> all(labels.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (limit == 0 || limit >= labels.size()) return all;
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i] == 1 ? 1 : 0].push_back(i);
  const auto total = static_cast<double>(labels.size());
  std::size_t quota[2] = {0, 0};
  for (int c = 0; c < 2; ++c) {
    const auto& members = by_class[c];
    if (members.empty()) continue;
    const auto q = static_cast<std::size_t>(std::llround(static_cast<double>(limit) * members.size() / total));
    quota[c] = std::clamp<std::size_t>(q, 1, members.size());
  }
  // Rounding both quotas up can overshoot; trim the larger class, never below one.
  const std::size_t cap = std::max<std::size_t>(limit, (quota[0] > 0) + (quota[1] > 0));
  while (quota[0] + quota[1] > cap) --quota[quota[0] >= quota[1] ? 0 : 1];
  std::vector<std::size_t> out;
  for (int c = 0; c < 2; ++c) {
    const auto& members = by_class[c];
    for (std::size_t q = 0; q < quota[c]; ++q) out.push_back(members[q * members.size() / quota[c]]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double Gpc2dModel::h_coordinate(int h) const {
  return dim_scale == DimScale::kUnit ? static_cast<double>(h) / n : static_cast<double>(h);
}

gpc::TrainingSet to_dataset(const Gpc2dTrainingSet& set, DimScale scale, const std::vector<std::size_t>& word_subset) {
  std::vector<char> keep(set.words.size(), word_subset.empty() ? 1 : 0);
  for (auto w : word_subset) keep.at(w) = 1;
  gpc::TrainingSet ds;
  std::vector<const Row2d*> rows;
  for (const auto& r : set.rows) {
    if (keep[r.word]) rows.push_back(&r);
  }
  ds.inputs.resize(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    ds.inputs(e, 0) = rows[i]->df;
    ds.inputs(e, 1) = scale == DimScale::kUnit ? static_cast<double>(rows[i]->h) / set.n : rows[i]->h;
    ds.labels.push_back(rows[i]->label);
  }
  return ds;
}

Gpc2dModel train_2d(const gpc::TrainingSet& ts, const Gpc2dConfig& config) {
  const auto set = build_2d_training(ts);
  const auto fit_words = stratified_subset(ts.labels, config.words_limit);
  gpc::Kernel kernel = gpc::Kernel::make(config.family);
  if (config.optimize) {
    // Evidence search on a subsample; the full fit is cubic in rows.
    std::vector<int> fit_labels;
    for (auto w : fit_words) fit_labels.push_back(ts.labels[w]);
    auto search_local = stratified_subset(fit_labels, config.search_words);
    std::vector<std::size_t> search;
    for (auto i : search_local) search.push_back(fit_words[i]);
    const auto search_set = to_dataset(set, config.dim_scale, search);
    kernel = gpc::optimize_hyperparameters(search_set, kernel, config.optimize_options);
  }
  Gpc2dModel model;
  model.n = set.n;
  model.dim_scale = config.dim_scale;
  model.aggregator = config.aggregator;
  model.training_words = fit_words.size();
  log::info("gpc2d: fitting ", fit_words.size() * static_cast<std::size_t>(set.n), " rows with ", kernel.describe());
  model.model = gpc::train(to_dataset(set, config.dim_scale, fit_words), kernel, config.optimize_options.train);
  return model;
}

GpcMatrix matrix(const Gpc2dModel& model) {
  GpcMatrix gm;
  gm.n = model.n;
  Eigen::MatrixXd q(kDfCells * model.n, 2);
  for (int r = 0; r < kDfCells; ++r) {
    for (int h = 1; h <= model.n; ++h) {
      const auto row = static_cast<Eigen::Index>(r * model.n + (h - 1));
      q(row, 0) = kDfStep * (r + 0.5);
      q(row, 1) = model.h_coordinate(h);
    }
  }
  const auto p = gpc::predict_probabilities(model.model, q);
  gm.values.assign(p.data(), p.data() + p.size());
  return gm;
}

double aggregate(const std::vector<double>& values, Aggregator a) {
  if (values.empty()) throw InputError("aggregate: no values");
  switch (a) {
    case Aggregator::kMean: {
      double s = 0.0;
      for (double v : values) s += v;
      return s / static_cast<double>(values.size());
    }
    case Aggregator::kGeometricMean: {
      double s = 0.0;
      for (double v : values) s += std::log(v);
      return std::exp(s / static_cast<double>(values.size()));
    }
    case Aggregator::kMedian: {
      auto v = values;
      std::sort(v.begin(), v.end());
      const auto n = v.size();
      return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
  }
  return 0.0;
}

std::vector<WordTrace> word_traces(const Gpc2dModel& model, const std::vector<features::SwdfVector>& words) {
  const auto n = static_cast<std::size_t>(model.n);
  for (const auto& w : words) {
    if (w.dimension() != n) {
      throw InputError("word_trace: word '" + w.word + "' has dimension " + std::to_string(w.dimension()) +
                       ", model expects " + std::to_string(n));
    }
  }
  // Many words share (df, h) points, zero entries in particular; each
  // distinct point is predicted once.
  std::map<std::pair<double, std::size_t>, Eigen::Index> slot;
  std::vector<Eigen::Index> index(words.size() * n);
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t h = 0; h < n; ++h) {
      const auto key = std::make_pair(words[i].sorted_normalized[h], h);
      auto it = slot.emplace(key, static_cast<Eigen::Index>(slot.size())).first;
      index[i * n + h] = it->second;
    }
  }
  Eigen::MatrixXd q(static_cast<Eigen::Index>(slot.size()), 2);
  for (const auto& [key, row] : slot) {
    q(row, 0) = key.first;
    q(row, 1) = model.h_coordinate(static_cast<int>(key.second + 1));
  }
  const auto p = gpc::predict_probabilities(model.model, q);
  std::vector<WordTrace> out;
  out.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    WordTrace t;
    t.word = words[i].word;
    std::vector<double> per_dim;
    for (std::size_t h = 0; h < n; ++h) {
      const double pt = p(index[i * n + h]);
      t.points.push_back({static_cast<int>(h + 1), words[i].sorted_normalized[h], pt});
      per_dim.push_back(pt);
    }
    t.aggregate_pt = aggregate(per_dim, model.aggregator);
    out.push_back(std::move(t));
  }
  return out;
}

WordTrace word_trace(const Gpc2dModel& model, const features::SwdfVector& swdf) {
  return word_traces(model, {swdf}).front();
}

std::vector<gpc::WordProbability> extract_l4(const std::vector<WordTrace>& traces, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("extract_l4: threshold must lie in [0, 1]");
  std::vector<gpc::WordProbability> out;
  for (const auto& t : traces) {
    if (t.aggregate_pt < threshold) out.push_back(gpc::make_probability(t.word, t.aggregate_pt));
  }
  gpc::sort_probabilities(out);
  return out;
}

}  // namespace stoplens::gpc2d
