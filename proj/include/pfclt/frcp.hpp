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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfclt/discretize.hpp"
#include "pfclt/kernels.hpp"

namespace pfclt {

using Profile = std::function<double(double)>;

/// Finite-rank commutator data of a matrix kernel on I_L = (-L, L):
///   A^dag B - B A        = sum_i f_i (x) g_i
///   D B - (alpha A^2 + beta A) = sum_i h_i (x) e_i
/// with alpha + beta = 1 for lambda = 1/2 and alpha + beta = 0 for lambda = 1.
struct FrcpData {
  KernelVariant variant = KernelVariant::Custom;
  double L = 0.0;
  double lambda = 1.0;
  int rank_bound = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<Profile> f;
  std::vector<Profile> g;
  std::vector<Profile> h;
  std::vector<Profile> e;

  bool constraint_holds() const;
  double commutator_kernel(double x, double y) const;
  double defect_kernel(double x, double y) const;
};

FrcpData sine4_frcp(double L);
FrcpData sine1_frcp(double L);
/// Throws UnsupportedError for kernels without registered data.
FrcpData frcp_for(const MatrixKernel& kernel, double L);

/// A^dag B - B A.
DiscreteOperator commutator_operator(const KernelOperators& ops);
/// D B - (alpha A^2 + beta A).
DiscreteOperator defect_operator(const KernelOperators& ops, double alpha, double beta);

struct RankReport {
  Eigen::VectorXd singular_values;
  int declared_rank = 0;
  /// sigma_{r+1} / sigma_1, or 0 when fewer singular values exist.
  double tail_ratio = 0.0;
  /// Max-abs kernel difference to a closed form; NaN when none was given.
  double residual = NAN;
  bool pass = false;
};

inline constexpr double kRankTolerance = 1e-6;
inline constexpr double kZeroOperatorThreshold = 1e-12;

/// Numerical rank test: passes when sigma_{r+1}/sigma_1 <= tolerance. An
/// operator with sigma_1 <= 1e-12 counts as rank 0 and passes for any r.
RankReport rank_check(const DiscreteOperator& op, int declared_rank,
                      double tolerance = kRankTolerance);

/// Max over node pairs of |op kernel - closed(x_i, x_j)|.
double closed_form_residual(const DiscreteOperator& op,
                            const std::function<double(double, double)>& closed);

struct IdentityCheck {
  std::string name;
  double L = 0.0;
  int nodes = 0;
  RankReport report;
};

/// Both commutator identities of the kernel on a grid with the given node
/// count: rank against N and residual against the closed forms.
std::vector<IdentityCheck> frcp_identity_checks(const MatrixKernel& kernel, double L,
                                                int nodes);

/// Operators and factor vectors entering the inner-product conditions.
struct ConditionInputs {
  DiscreteOperator A;
  DiscreteOperator A_dag;
  DiscreteOperator D;
  std::vector<Eigen::VectorXd> f;
  std::vector<Eigen::VectorXd> g;
  std::vector<Eigen::VectorXd> h;
  std::vector<Eigen::VectorXd> e;
};

ConditionInputs condition_inputs(const MatrixKernel& kernel, double L, double density);

struct ConditionEntry {
  std::string family;
  int i = 0;
  int j = 0;
  int m = 0;
  int n = 0;
  double value = 0.0;
};

struct ConditionRow {
  double L = 0.0;
  double max_abs = 0.0;
  std::vector<ConditionEntry> entries;
};

/// <D A^dag^m f_i, A^n g_j>, <D A^dag^m f_i, A^n e_j>, <h_i, A^n g_j> and
/// <h_i, A^n e_j> for m <= m_max, n <= n_max.
ConditionRow condition_inner_products(const ConditionInputs& in, double L, int m_max,
                                      int n_max);
std::vector<ConditionRow> condition_iv_scan(const MatrixKernel& kernel,
                                            const std::vector<double>& Ls, int m_max,
                                            int n_max, double density = kDefaultDensity);

/// Factor functions of the per-piece identities for a step function with
/// pieces (a_i L, b_i L) (Sine4 only):
///   A chi_i B - B chi_i A = sum_j f_ij (x) g_ij
///   D chi_i B - A chi_i A = sum_j h_ij (x) e_ij
struct StepFrcpData {
  double L = 0.0;
  StepFunction scaled;
  std::vector<std::vector<Profile>> f, g, h, e;
};

StepFrcpData step_frcp(const MatrixKernel& kernel, const StepFunction& step, double L);

/// Per-piece identities of a step function checked like
/// frcp_identity_checks (rank 2 each, closed-form residual).
std::vector<IdentityCheck> step_identity_checks(const MatrixKernel& kernel,
                                                const StepFunction& step, double L,
                                                double density = kDefaultDensity);

struct StepConditionRow {
  double L = 0.0;
  double max_abs_inner = 0.0;
  /// max over pieces of ||chi_i A chi_i - (chi_i A chi_i)^2||_1.
  double max_projection_defect = 0.0;
  /// max over i != j of ||chi_i A chi_j A chi_i||_1.
  double max_cross_trace_norm = 0.0;
  std::vector<ConditionEntry> entries;
};

/// Projection-sandwiched inner products for words of length m in {2, 3}
/// (after D) and m' in {1, 2}, plus the trace-norm quantities of the step
/// assumptions.
std::vector<StepConditionRow> condition_scan_step(const MatrixKernel& kernel,
                                                  const StepFunction& step,
                                                  const std::vector<double>& Ls,
                                                  double density = kDefaultDensity);

}  // namespace pfclt
