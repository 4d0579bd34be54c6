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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pfclt/discretize.hpp"
#include "pfclt/frcp.hpp"
#include "pfclt/kernels.hpp"

namespace pfclt {

using Count = unsigned __int128;

inline constexpr int kMaxStirlingN = 30;
inline constexpr int kMaxTracePower = 8;
inline constexpr int kMaxCumulantOrder = 8;
inline constexpr int kMaxLinearStatOrder = 6;
inline constexpr int kDefaultCumulantOrder = 5;
/// Largest block operator (2n x 2n) assembled for trace powers.
inline constexpr int kMaxBlockDim = 8192;

/// v(n, k) = v(n-1, k-1) + k v(n-1, k), v(1, 1) = 1: Stirling numbers of
/// the second kind. 0 <= k <= n <= 30.
Count stirling_v(int n, int k);
std::string to_string(Count c);

/// V_k = Tr(K^k) / 2 for k = 1..k_max (entry k - 1).
std::vector<double> v_k_traces(const BlockOperator& k_op, int k_max);
std::vector<double> v_k_traces(const MatrixKernel& kernel, double L, double density,
                               int k_max);

struct CumulantReport {
  double L = 0.0;
  double expectation = 0.0;
  double variance = 0.0;
  std::vector<double> v_k;
  /// c_1 .. c_nmax.
  std::vector<double> c_n;
  /// c_n / variance^(n/2), same indexing as c_n.
  std::vector<double> normalized;
};

/// c_n from V_1..V_n; the telescoped form is checked against the direct sum
/// (relative tolerance) and a ConsistencyError raised on disagreement.
std::vector<double> cumulants_from_traces(const std::vector<double>& v, int n_max,
                                          double tolerance = 1e-8);
/// The telescoped sum over k = 2..n of (-1)^(k-1) (k-1)! v(n-1,k-1) (V_k - V_(k-1)).
double telescoped_cumulant(const std::vector<double>& v, int n);

CumulantReport cumulant_counts(const MatrixKernel& kernel, double L, int n_max,
                               double density = kDefaultDensity);

struct Moments {
  double expectation = 0.0;
  double variance = 0.0;
};

/// Expectation and variance of the linear statistic of f(x / L) by direct
/// one- and two-dimensional quadrature of the kernel.
Moments expectation_variance(const MatrixKernel& kernel, const StepFunction& f, double L);
/// Counting statistic on (-L, L).
Moments expectation_variance(const MatrixKernel& kernel, double L);

/// Cumulants of the linear statistic of f(x / L) from the composition sum of
/// traces Tr(F^l1 K F^l2 K ... F^lk K).
CumulantReport cumulant_linear_stat(const MatrixKernel& kernel, const StepFunction& f,
                                    double L, int n_max, double density = kDefaultDensity);

struct DecompositionReport {
  int k = 0;
  double L = 0.0;
  double lhs = 0.0;
  /// lambda Tr(A^k) + Tr((A - A^2) p_k(A)).
  double polynomial_part = 0.0;
  double finite_rank_part = 0.0;
  double rhs = 0.0;
  double relative_residual = 0.0;
  /// Coefficients of p_k, constant term first.
  std::vector<double> p_k;
};

/// Coefficients of p_k such that lambda^k q_k(t) = lambda t^k + (t - t^2) p_k(t),
/// where q_k collects every chain word with each excursion D A^dag^n B
/// replaced by (alpha t^2 + beta t) t^n.
std::vector<double> trace_polynomial(int k, double lambda, double alpha, double beta);

/// Compares Tr(K^k) / 2 with the expansion in which every excursion
/// D A^dag^n B is rewritten through the commutator identities, so the right
/// side never touches B.
DecompositionReport trace_decomposition_check(const KernelOperators& ops,
                                              const FrcpData& data, int k);
DecompositionReport trace_decomposition_check(const MatrixKernel& kernel, double L, int k,
                                              double density = kDefaultDensity);

/// c_n / Var^(n/2) for n = 3..n_max (entry n - 3).
std::vector<double> clt_diagnostic(const CumulantReport& report);

/// Coefficient of log L in the variance of the statistic of phi(x / L):
/// 1 / (2 pi^2) and 2 / pi^2 for Sine4 and Sine1 counts, and for Sine4 step
/// functions the sum of squared jumps of phi over 4 pi^2. Empty when no
/// closed form is known (Sine1 step functions, custom kernels).
std::optional<double> variance_log_coefficient(const MatrixKernel& kernel,
                                               const std::optional<StepFunction>& step);

/// Trace norm of A - A^2 for the kernel's A block on (-L, L).
double projection_defect_norm(const MatrixKernel& kernel, double L,
                              double density = kDefaultDensity);

/// Least-squares slope of log(y) against log(x); y must be positive.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares slope of y against log(x).
double log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pfclt
