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

#include "pfclt/skewlin.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "pfclt/errors.hpp"

namespace pfclt {

SkewMatrix::SkewMatrix(const Eigen::MatrixXd& entries, double tolerance) {
  if (entries.rows() != entries.cols()) {
    throw DimensionError("skew matrix must be square, got " +
                         std::to_string(entries.rows()) + "x" +
                         std::to_string(entries.cols()));
  }
  if (entries.rows() == 0) throw DimensionError("skew matrix must be non-empty");
  const double defect = (entries + entries.transpose()).cwiseAbs().maxCoeff();
  if (!(defect <= tolerance)) {
    throw ValidationError("matrix is not antisymmetric: max |M + M^T| = " +
                          std::to_string(defect));
  }
  entries_ = 0.5 * (entries - entries.transpose());
  entries_.diagonal().setZero();
}

SkewMatrix SkewMatrix::zero(int dim) {
  return SkewMatrix(Eigen::MatrixXd::Zero(dim, dim));
}

SkewMatrix SkewMatrix::scaled(double c) const { return SkewMatrix(c * entries_); }

namespace {

void require_even(const SkewMatrix& m) {
  if (m.dim() % 2 != 0) {
    throw DimensionError("Pfaffian requires even dimension, got " +
                         std::to_string(m.dim()));
  }
}

void swap_row_col(Eigen::MatrixXd& a, int i, int j) {
  a.row(i).swap(a.row(j));
  a.col(i).swap(a.col(j));
}

}  // namespace

SkewTridiagonalization skew_tridiagonalize(const SkewMatrix& m) {
  require_even(m);
  const int n = m.dim();
  Eigen::MatrixXd a = m.entries();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int swaps = 0;

  for (int k = 0; k + 2 < n; ++k) {
    // Largest entry of column k below the subdiagonal; ties keep k + 1.
    int pivot = k + 1;
    double best = std::abs(a(k + 1, k));
    for (int i = k + 2; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        pivot = i;
      }
    }
    if (pivot != k + 1) {
      swap_row_col(a, k + 1, pivot);
      std::swap(perm[k + 1], perm[pivot]);
      ++swaps;
    }
    if (best < kPivotThreshold) continue;  // column already eliminated

    const double p = a(k + 1, k);
    for (int i = k + 2; i < n; ++i) {
      const double tau = a(i, k) / p;
      if (tau == 0.0) continue;
      a.row(i) -= tau * a.row(k + 1);
      a.col(i) -= tau * a.col(k + 1);
      a(i, k) = 0.0;
      a(k, i) = 0.0;
    }
  }

  // Drop the rounding residue outside the tridiagonal band.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(i - j) != 1) a(i, j) = 0.0;
    }
  }
  Eigen::MatrixXd t = 0.5 * (a - a.transpose());
  return {SkewMatrix(t, std::numeric_limits<double>::infinity()), std::move(perm),
          (swaps % 2 == 0) ? 1 : -1, swaps};
}

double SkewTridiagonalization::pfaffian() const {
  double pf = sign;
  for (int k = 0; k < tridiagonal.dim(); k += 2) {
    const double sup = tridiagonal(k, k + 1);
    if (std::abs(sup) < kPivotThreshold) return 0.0;
    pf *= sup;
  }
  return pf;
}

double pfaffian(const SkewMatrix& m) { return skew_tridiagonalize(m).pfaffian(); }

namespace {

// Expansion along the first remaining index; each leaf is one perfect matching.
double matching_sum(const Eigen::MatrixXd& a, std::vector<int>& rest) {
  if (rest.empty()) return 1.0;
  const int first = rest.front();
  double total = 0.0;
  for (std::size_t j = 1; j < rest.size(); ++j) {
    const int partner = rest[j];
    const double entry = a(first, partner);
    if (entry == 0.0) continue;
    std::vector<int> sub;
    sub.reserve(rest.size() - 2);
    for (std::size_t t = 1; t < rest.size(); ++t) {
      if (t != j) sub.push_back(rest[t]);
    }
    const double sgn = (j % 2 == 1) ? 1.0 : -1.0;
    total += sgn * entry * matching_sum(a, sub);
  }
  return total;
}

}  // namespace

double pfaffian_bruteforce(const SkewMatrix& m) {
  require_even(m);
  if (m.dim() > 12) {
    throw SizeError("pfaffian_bruteforce limited to dim <= 12, got " +
                    std::to_string(m.dim()));
  }
  std::vector<int> all(m.dim());
  std::iota(all.begin(), all.end(), 0);
  return matching_sum(m.entries(), all);
}

double determinant(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionError("determinant of non-square matrix");
  return m.partialPivLu().determinant();
}

}  // namespace pfclt
