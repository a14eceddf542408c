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

#include <string>
#include <string_view>
#include <vector>

#include "stoplens/features.hpp"
#include "stoplens/gpc.hpp"

namespace stoplens::gpc2d {

inline constexpr int kDfCells = 50;
inline constexpr double kDfStep = 0.02;

enum class Aggregator { kMean, kGeometricMean, kMedian };
/// How the rank position h enters the kernel: h / n (unit) or h itself (raw).
enum class DimScale { kUnit, kRaw };

std::string_view aggregator_name(Aggregator a);
Aggregator parse_aggregator(std::string_view name);
std::string_view dim_scale_name(DimScale s);
DimScale parse_dim_scale(std::string_view name);

struct Gpc2dConfig {
  gpc::KernelFamily family = gpc::KernelFamily::kRadialBasis;
  bool optimize = true;
  /// Words (stratified by class) used for the evidence search; 0 = all.
  std::size_t search_words = 12;
  /// Words used for the final fit; 0 = all training words.
  std::size_t words_limit = 0;
  DimScale dim_scale = DimScale::kUnit;
  Aggregator aggregator = Aggregator::kMean;
  gpc::OptimizeOptions optimize_options;
};

struct Row2d {
  double df = 0.0;
  int h = 1;  // 1-based rank position
  int label = 0;
  std::size_t word = 0;  // index into words
};

/// One row per (training word, dimension), word-major then h.
struct Gpc2dTrainingSet {
  int n = 0;
  std::vector<Row2d> rows;
  std::vector<std::string> words;
};

Gpc2dTrainingSet build_2d_training(const gpc::TrainingSet& ts);

/// Deterministic class-stratified, evenly spaced subset of word indices.
std::vector<std::size_t> stratified_subset(const std::vector<int>& labels, std::size_t limit);

/// 2-D inputs (df, h coordinate) ready for the Laplace classifier.
gpc::TrainingSet to_dataset(const Gpc2dTrainingSet& set, DimScale scale,
                            const std::vector<std::size_t>& word_subset = {});

struct Gpc2dModel {
  gpc::GpcModel model;
  int n = 0;
  DimScale dim_scale = DimScale::kUnit;
  Aggregator aggregator = Aggregator::kMean;
  std::size_t training_words = 0;

  double h_coordinate(int h) const;
};

Gpc2dModel train_2d(const gpc::TrainingSet& ts, const Gpc2dConfig& config);

/// p_t over cell centres: df = 0.01 + 0.02 r (r = 0..49) by h = 1..n.
struct GpcMatrix {
  int n = 0;
  int df_cells = kDfCells;
  double df_step = kDfStep;
  std::vector<double> values;  // row-major, df_cells rows x n columns

  double at(int df_row, int h) const { return values[static_cast<std::size_t>(df_row * n + (h - 1))]; }
};

GpcMatrix matrix(const Gpc2dModel& model);

struct TracePoint {
  int h = 1;
  double df = 0.0;
  double p_t = 0.5;
};

struct WordTrace {
  std::string word;
  std::vector<TracePoint> points;
  double aggregate_pt = 0.5;
};

double aggregate(const std::vector<double>& values, Aggregator a);

WordTrace word_trace(const Gpc2dModel& model, const features::SwdfVector& swdf);
/// Batched form of word_trace.
std::vector<WordTrace> word_traces(const Gpc2dModel& model, const std::vector<features::SwdfVector>& words);

/// Words with aggregate_pt strictly below threshold, ascending by aggregate_pt then word.
std::vector<gpc::WordProbability> extract_l4(const std::vector<WordTrace>& traces, double threshold);

}  // namespace stoplens::gpc2d
