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

#include "stoplens/kernel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stoplens/error.hpp"

namespace stoplens::gpc {

std::string_view family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::kRadialBasis: return "radial-basis";
    case KernelFamily::kMatern32: return "matern";
    case KernelFamily::kRationalQuadratic: return "rational-quadratic";
    case KernelFamily::kExpSineSquared: return "exp-sine-squared";
    case KernelFamily::kDotProduct: return "dot-product";
    case KernelFamily::kWhite: return "white";
  }
  return "?";
}

KernelFamily parse_family(std::string_view name) {
  for (auto f : all_families()) {
    if (family_name(f) == name) return f;
  }
  if (name == "rbf") return KernelFamily::kRadialBasis;
  throw InputError("unknown kernel family '" + std::string(name) + "'");
}

std::string_view param_name(HyperParam p) {
  switch (p) {
    case HyperParam::kVariance: return "variance";
    case HyperParam::kLengthScale: return "length_scale";
    case HyperParam::kAlpha: return "alpha";
    case HyperParam::kPeriodicity: return "periodicity";
    case HyperParam::kSigma0: return "sigma0";
  }
  return "?";
}

const std::vector<KernelFamily>& all_families() {
  static const std::vector<KernelFamily> families = {
      KernelFamily::kRadialBasis,    KernelFamily::kMatern32,   KernelFamily::kRationalQuadratic,
      KernelFamily::kExpSineSquared, KernelFamily::kDotProduct, KernelFamily::kWhite};
  return families;
}

Kernel Kernel::make(KernelFamily family) {
  Kernel k;
  k.family = family;
  return k;
}

std::vector<HyperParam> Kernel::free_params() const {
  switch (family) {
    case KernelFamily::kRadialBasis:
    case KernelFamily::kMatern32: return {HyperParam::kVariance, HyperParam::kLengthScale};
    case KernelFamily::kRationalQuadratic: return {HyperParam::kLengthScale, HyperParam::kAlpha};
    case KernelFamily::kExpSineSquared: return {HyperParam::kLengthScale, HyperParam::kPeriodicity};
    case KernelFamily::kDotProduct: return {HyperParam::kVariance, HyperParam::kSigma0};
    case KernelFamily::kWhite: return {HyperParam::kVariance};
  }
  return {};
}

double Kernel::get(HyperParam p) const {
  switch (p) {
    case HyperParam::kVariance: return variance;
    case HyperParam::kLengthScale: return length_scale;
    case HyperParam::kAlpha: return alpha;
    case HyperParam::kPeriodicity: return periodicity;
    case HyperParam::kSigma0: return sigma0;
  }
  return 0.0;
}

void Kernel::set(HyperParam p, double value) {
  switch (p) {
    case HyperParam::kVariance: variance = value; break;
    case HyperParam::kLengthScale: length_scale = value; break;
    case HyperParam::kAlpha: alpha = value; break;
    case HyperParam::kPeriodicity: periodicity = value; break;
    case HyperParam::kSigma0: sigma0 = value; break;
  }
}

void Kernel::validate() const {
  for (double v : {variance, length_scale, alpha, periodicity, sigma0}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("kernel hyperparameters must be finite and > 0");
  }
}

double Kernel::eval(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) const {
  switch (family) {
    case KernelFamily::kRadialBasis: {
      const double r2 = (a - b).squaredNorm();
      return variance * std::exp(-0.5 * r2 / (length_scale * length_scale));
    }
    case KernelFamily::kMatern32: {
      const double s = std::sqrt(3.0) * (a - b).norm() / length_scale;
      return variance * (1.0 + s) * std::exp(-s);
    }
    case KernelFamily::kRationalQuadratic: {
      const double r2 = (a - b).squaredNorm();
      return variance * std::pow(1.0 + r2 / (2.0 * alpha * length_scale * length_scale), -alpha);
    }
    case KernelFamily::kExpSineSquared: {
      const double s = std::sin(std::numbers::pi * (a - b).norm() / periodicity);
      return variance * std::exp(-2.0 * s * s / (length_scale * length_scale));
    }
    case KernelFamily::kDotProduct:
      return variance * (sigma0 * sigma0 + a.dot(b));
    case KernelFamily::kWhite:
      return 0.0;
  }
  return 0.0;
}

Eigen::MatrixXd Kernel::gram(const Eigen::MatrixXd& x) const {
  const auto n = x.rows();
  Eigen::MatrixXd k(n, n);
  if (family == KernelFamily::kWhite) {
    k.setIdentity();
    return k * variance;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = eval(x.row(i), x.row(j));
    }
  }
  return k;
}

Eigen::MatrixXd Kernel::cross(const Eigen::MatrixXd& train, const Eigen::MatrixXd& query) const {
  Eigen::MatrixXd k(train.rows(), query.rows());
  if (family == KernelFamily::kWhite) {
    k.setZero();
    return k;
  }
  for (Eigen::Index j = 0; j < query.rows(); ++j) {
    for (Eigen::Index i = 0; i < train.rows(); ++i) k(i, j) = eval(train.row(i), query.row(j));
  }
  return k;
}

double Kernel::self(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  if (family == KernelFamily::kWhite) return variance;
  return eval(x, x);
}

std::string Kernel::describe() const {
  std::ostringstream os;
  os << family_name(family) << "(";
  bool first = true;
  for (auto p : free_params()) {
    os << (first ? "" : ", ") << param_name(p) << "=" << get(p);
    first = false;
  }
  os << ")";
  return os.str();
}

}  // namespace stoplens::gpc
