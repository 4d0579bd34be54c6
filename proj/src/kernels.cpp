/*
 * Copyright 2026 The pfclt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pfclt/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "pfclt/errors.hpp"
#include "pfclt/skewlin.hpp"
#include "pfclt/special.hpp"

namespace pfclt {

std::string to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::Sine1: return "sine1";
    case KernelVariant::Sine4: return "sine4";
    case KernelVariant::Custom: return "custom";
  }
  return "unknown";
}

KernelVariant parse_kernel_variant(const std::string& name) {
  if (name == "sine1") return KernelVariant::Sine1;
  if (name == "sine4") return KernelVariant::Sine4;
  throw ValidationError("unknown kernel '" + name + "' (expected sine1 or sine4)");
}

double MatrixKernel::b(double x, double y) const {
  double v = b_smooth ? b_smooth(x, y) : 0.0;
  if (b_jump != 0.0) v += b_jump * sgn(x - y);
  return v;
}

Eigen::Matrix2d MatrixKernel::operator()(double x, double y) const {
  Eigen::Matrix2d k;
  k << (a ? a(x, y) : 0.0), (d ? d(x, y) : 0.0),
       b(x, y), (a ? a(y, x) : 0.0);
  return lambda * k;
}

Eigen::Matrix2d MatrixKernel::pfaffian_block(double x, double y) const {
  const Eigen::Matrix2d k = (*this)(x, y);
  Eigen::Matrix2d z;
  z << k(1, 0), k(1, 1),
      -k(0, 0), -k(0, 1);
  return z;
}

double MatrixKernel::det(double x, double y) const { return (*this)(x, y).determinant(); }

MatrixKernel sine4_kernel() {
  MatrixKernel k;
  k.variant = KernelVariant::Sine4;
  k.lambda = 0.5;
  k.a = [](double x, double y) { return sinc_s(x - y); };
  k.d = [](double x, double y) { return sinc_s_prime(x - y); };
  k.b_smooth = [](double x, double y) { return sine_integral_is(x - y); };
  return k;
}

MatrixKernel sine1_kernel() {
  MatrixKernel k = sine4_kernel();
  k.variant = KernelVariant::Sine1;
  k.lambda = 1.0;
  k.b_jump = -0.5;
  return k;
}

MatrixKernel kernel_by_variant(KernelVariant v) {
  switch (v) {
    case KernelVariant::Sine1: return sine1_kernel();
    case KernelVariant::Sine4: return sine4_kernel();
    case KernelVariant::Custom: break;
  }
  throw ValidationError("no built-in kernel for variant 'custom'");
}

bool CorrelationRequest::has_duplicates() const {
  std::vector<double> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

Eigen::MatrixXd correlation_matrix(const MatrixKernel& kernel,
                                   std::span<const double> points) {
  const auto k = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd r(2 * k, 2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      r.block<2, 2>(2 * i, 2 * j) = kernel.pfaffian_block(points[i], points[j]);
    }
  }
  return r;
}

double correlation(const CorrelationRequest& req) {
  if (req.points.empty()) throw ValidationError("correlation needs at least one point");
  const Eigen::MatrixXd r = correlation_matrix(req.kernel, req.points);
  try {
    return pfaffian(SkewMatrix(r));
  } catch (const ValidationError& e) {
    throw ConsistencyError(std::string("assembled correlation matrix is not "
                                       "antisymmetric (kernel symmetry bug): ") +
                           e.what());
  }
}

}  // namespace pfclt
