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

#include <vector>

#include <Eigen/Dense>

namespace pfclt {

/// Real antisymmetric matrix. Construction validates antisymmetry to an
/// absolute tolerance and then replaces the entries by (M - M^T) / 2, so the
/// stored matrix is exactly antisymmetric with a zero diagonal.
class SkewMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-12;

  explicit SkewMatrix(const Eigen::MatrixXd& entries,
                      double tolerance = kDefaultTolerance);

  static SkewMatrix zero(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }
  const Eigen::MatrixXd& entries() const { return entries_; }

  SkewMatrix scaled(double c) const;

 private:
  Eigen::MatrixXd entries_;
};

/// Result of Parlett-Reid reduction: P m P^T = G T G^T with G unit lower
/// triangular, T skew-tridiagonal and P the accumulated row/column swaps.
struct SkewTridiagonalization {
  SkewMatrix tridiagonal;
  /// permutation[i] = original index placed at position i.
  std::vector<int> permutation;
  /// det(P), i.e. (-1)^(number of swaps).
  int sign = 1;
  /// Number of interchanges actually performed.
  int swaps = 0;

  /// Pf(m) = sign * Pf(T) = sign * T(0,1) T(2,3) ... T(n-2,n-1).
  double pfaffian() const;
};

/// Pivots smaller than this are treated as exact zeros.
inline constexpr double kPivotThreshold = 1e-300;

SkewTridiagonalization skew_tridiagonalize(const SkewMatrix& m);

/// Pfaffian via Parlett-Reid with partial pivoting. Pf([[0,1],[-1,0]]) = 1.
double pfaffian(const SkewMatrix& m);

/// Pfaffian as the signed sum over perfect matchings. dim <= 12.
double pfaffian_bruteforce(const SkewMatrix& m);

/// Determinant by LU with partial pivoting.
double determinant(const Eigen::MatrixXd& m);

}  // namespace pfclt
