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

#include <string>
#include <string_view>
#include <vector>

namespace stoplens::gpc {

enum class KernelFamily { kRadialBasis, kMatern32, kRationalQuadratic, kExpSineSquared, kDotProduct, kWhite };

enum class HyperParam { kVariance, kLengthScale, kAlpha, kPeriodicity, kSigma0 };

std::string_view family_name(KernelFamily family);
KernelFamily parse_family(std::string_view name);
std::string_view param_name(HyperParam p);
const std::vector<KernelFamily>& all_families();

/// Covariance function over row-vector inputs.
///
///   radial-basis         s2 * exp(-r^2 / (2 l^2))
///   matern (nu = 3/2)    s2 * (1 + sqrt(3) r / l) * exp(-sqrt(3) r / l)
///   rational-quadratic   s2 * (1 + r^2 / (2 a l^2))^-a
///   exp-sine-squared     s2 * exp(-2 sin^2(pi r / p) / l^2)
///   dot-product          s2 * (sigma0^2 + x.y)
///   white                s2 * [same training index]
///
/// White noise is uncorrelated across distinct evaluations, so its
/// cross-covariance between a training set and query points is zero even when
/// a query coincides with a training input.
struct Kernel {
  KernelFamily family = KernelFamily::kRadialBasis;
  double variance = 1.0;
  double length_scale = 1.0;
  double alpha = 1.0;
  double periodicity = 1.0;
  double sigma0 = 1.0;

  static Kernel make(KernelFamily family);

  /// Hyperparameters searched by the evidence optimizer (at most two).
  std::vector<HyperParam> free_params() const;
  double get(HyperParam p) const;
  void set(HyperParam p, double value);
  void validate() const;

  double eval(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) const;
  /// Training covariance over the rows of x.
  Eigen::MatrixXd gram(const Eigen::MatrixXd& x) const;
  /// Covariance between training rows and query rows (n_train x n_query).
  Eigen::MatrixXd cross(const Eigen::MatrixXd& train, const Eigen::MatrixXd& query) const;
  /// Prior variance k(x, x) at a query point.
  double self(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;

  std::string describe() const;
  bool operator==(const Kernel&) const = default;
};

}  // namespace stoplens::gpc
