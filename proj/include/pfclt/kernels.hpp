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

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pfclt {

enum class KernelVariant { Sine1, Sine4, Custom };

std::string to_string(KernelVariant v);
KernelVariant parse_kernel_variant(const std::string& name);

using ScalarKernel = std::function<double(double, double)>;

/// 2x2 matrix kernel K(x,y) = lambda * [[a(x,y), d(x,y)], [b(x,y), a(y,x)]].
///
/// The b entry is split as b(x,y) = b_smooth(x,y) + b_jump * sgn(x - y) so
/// that discretizations can treat the jump across the diagonal exactly
/// (Sine1 carries b_jump = -1/2; every other kernel here has b_jump = 0).
struct MatrixKernel {
  KernelVariant variant = KernelVariant::Custom;
  double lambda = 1.0;
  ScalarKernel a;
  ScalarKernel d;
  ScalarKernel b_smooth;
  double b_jump = 0.0;

  double b(double x, double y) const;
  Eigen::Matrix2d operator()(double x, double y) const;
  /// Z K(x,y) with Z = [[0,1],[-1,0]]; antisymmetric in the sense
  /// KK(x,y)^T = -KK(y,x).
  Eigen::Matrix2d pfaffian_block(double x, double y) const;
  /// det K(x,y), the two-point cluster function used by the variance formula.
  double det(double x, double y) const;
};

/// Symplectic sine kernel, density 1/2.
MatrixKernel sine4_kernel();
/// Orthogonal sine kernel, density 1.
MatrixKernel sine1_kernel();
MatrixKernel kernel_by_variant(KernelVariant v);

struct CorrelationRequest {
  std::vector<double> points;
  MatrixKernel kernel;

  /// True when two points coincide; rho_k is then degenerate (zero).
  bool has_duplicates() const;
};

/// Assembles the 2k x 2k matrix of blocks Z K(x_i, x_j).
Eigen::MatrixXd correlation_matrix(const MatrixKernel& kernel,
                                   std::span<const double> points);

/// rho_k(x_1..x_k) = Pf[Z K(x_i, x_j)].
double correlation(const CorrelationRequest& req);

}  // namespace pfclt
